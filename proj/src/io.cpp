#include "semiholo/io.hpp"

#include <cstdio>

namespace semiholo {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json point_json(const CPoint& p) {
  return json::array({p.x.real(), p.x.imag(), p.y.real(), p.y.imag()});
}

json to_json(const ResidualRecord& r) {
  return {{"point", point_json(r.point)}, {"residual", r.residual}, {"kind", r.kind}};
}

json to_json(const CompanionResidual& r) {
  json j = {{"kind", r.kind}, {"value", r.value}, {"samples", r.samples}, {"asserted", r.asserted}};
  if (r.asserted) j["tolerance"] = r.tolerance;
  return j;
}

json gallery_list_json() {
  json out = json::array();
  for (const auto& label : gallery_labels()) {
    GalleryEntry e = gallery_entry(label);
    out.push_back({{"label", e.label},
                   {"has_system", e.system.has_value()},
                   {"has_first_integral", e.first_integral.has_value()},
                   {"has_motion", e.motion.has_value()},
                   {"notes", e.notes}});
  }
  return out;
}

json to_json(const GalleryEntry& e) {
  json guards = json::array();
  for (const auto& g : e.field.guards) guards.push_back(to_string(g));
  json j = {{"label", e.label}, {"lambda", to_string(e.field.lambda)}, {"guards", guards}};
  j["system"] = e.system ? json(to_string(e.system->F)) : json(nullptr);
  j["first_integral"] = e.first_integral ? json(to_string(*e.first_integral)) : json(nullptr);
  if (e.motion)
    j["motion"] = {{"phi", to_string(e.motion->phi)},
                   {"base_x", {e.motion->base_x.real(), e.motion->base_x.imag()}}};
  else
    j["motion"] = nullptr;
  j["box"] = e.box.bounds;
  j["report_only"] = e.report_only;
  j["notes"] = e.notes;
  return j;
}

GroupEmbedding octagon_embedding(const Cocycle& c) {
  std::vector<Mobius2> gens = octagon_generators();
  GroupEmbedding g;
  g.genus = static_cast<int>(gens.size()) / 2;
  g.cocycle = c.empty() ? Cocycle(gens.size(), Vec2::Zero()) : c;
  g.generators = embed_all(gens, g.cocycle);
  g.relation_residual = relation_residual(g.generators, Presentation::surface(g.genus));
  return g;
}

json to_json(const GroupEmbedding& g) {
  json gens = json::array();
  for (const Mat3& m : g.generators) {
    json row = json::array();
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) row.push_back(m(i, k));
    gens.push_back(row);
  }
  json coc = json::array();
  for (const Vec2& c : g.cocycle) coc.push_back({c(0), c(1)});
  return {{"genus", g.genus},
          {"generators", gens},
          {"cocycle", coc},
          {"relation_residual", g.relation_residual}};
}

GroupEmbedding embedding_from_json(const json& j) {
  GroupEmbedding g;
  g.genus = j.at("genus").get<int>();
  for (const auto& row : j.at("generators")) {
    if (row.size() != 9) throw Error("generator must have 9 entries");
    Mat3 m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = row.at(i).get<double>();
    g.generators.push_back(m);
  }
  if (j.contains("cocycle"))
    for (const auto& c : j.at("cocycle")) g.cocycle.push_back(Vec2(c.at(0).get<double>(), c.at(1).get<double>()));
  if (j.contains("relation_residual")) g.relation_residual = j.at("relation_residual").get<double>();
  if (static_cast<int>(g.generators.size()) != 2 * g.genus)
    throw Error("generator count does not match the genus");
  return g;
}

}  // namespace semiholo
