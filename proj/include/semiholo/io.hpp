#pragma once

// JSON and CSV records shared by the command line and the tests.

#include <string>
#include <vector>

#include <json.hpp>

#include "semiholo/foliation.hpp"
#include "semiholo/gallery.hpp"
#include "semiholo/moduli.hpp"

namespace semiholo {

using json = nlohmann::ordered_json;

/// %.17g
std::string format_double(double v);

json point_json(const CPoint& p);
json to_json(const ResidualRecord& r);
json to_json(const CompanionResidual& r);

/// {label, has_system, has_first_integral, has_motion, notes}
json gallery_list_json();
json to_json(const GalleryEntry& e);

struct GroupEmbedding {
  int genus = 0;
  std::vector<Mat3> generators;
  Cocycle cocycle;
  double relation_residual = 0.0;
};

/// Octagon generators embedded with the given cocycle (zero when empty).
GroupEmbedding octagon_embedding(const Cocycle& c = {});

json to_json(const GroupEmbedding& g);
/// Reads generators and cocycle; the stored residual is kept as found.
GroupEmbedding embedding_from_json(const json& j);

}  // namespace semiholo
