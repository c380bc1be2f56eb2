#include <doctest.h>

#include <cmath>

#include "random_expr.hpp"
#include "semiholo/wirtinger.hpp"

using namespace semiholo;

namespace {

const cplx I{0.0, 1.0};

// all 15 multi-indices of total order <= 2
std::vector<std::array<int, 4>> multi_indices() {
  std::vector<std::array<int, 4>> out;
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; j <= 2 - i; ++j)
      for (int k = 0; k <= 2 - i - j; ++k)
        for (int l = 0; l <= 2 - i - j - k; ++l) out.push_back({i, j, k, l});
  return out;
}

PointFunction evaluator(const Expr& e) {
  return [e](const CPoint& p) { return eval(e, p); };
}

}  // namespace

TEST_SUITE("wirtinger") {

TEST_CASE("parse builds the expected trees") {
  Expr e = parse("im(y)/im(x)");
  CHECK(e.op() == Op::Div);
  CHECK(e.lhs().op() == Op::Im);
  CHECK(e.lhs().lhs().op() == Op::VarY);
  CHECK(e.rhs().op() == Op::Im);
  CHECK(e.rhs().lhs().op() == Op::VarX);

  Expr parab = parse("2*x*re(y)/re(1+x^2)");
  Expr built = Expr::constant(2.0) * Expr::x() * re(Expr::y()) /
               re(Expr::constant(1.0) + pow(Expr::x(), 2));
  CHECK(parab == built);
  CHECK(parse(" im( y ) / im(x) ") == e);
}

TEST_CASE("syntax errors carry the byte offset") {
  auto offset = [](const std::string& s) -> long {
    try {
      parse(s);
    } catch (const SyntaxError& err) {
      return static_cast<long>(err.offset());
    }
    return -1;
  };
  CHECK(offset("(") == 1);
  CHECK(offset("x+") == 2);
  CHECK(offset("foo(x)") == 0);
  CHECK(offset("x^y") == 2);
  CHECK(offset("x)") == 1);
  CHECK(offset("") == 0);
  CHECK(offset("1e999") == 0);
}

TEST_CASE("printer round trip") {
  for (const char* s : {"im(y)/im(x)", "2*x*re(y)/re(1+x^2)", "-(x+y)", "x-(y-x)", "(x*y)^2",
                        "-x^2", "-(x^2)", "x/(y*x)", "x^-2", "(1-x)^3/(2+y)", "conj(x*i)+exp(-y)",
                        "log(sqrt(1+x*conj(x)))", "bump(re(x))", "0.1*x+1e-3", "p/x",
                        "(x*p-y)^3"}) {
    Expr e = parse(s);
    CHECK_MESSAGE(parse(to_string(e)) == e, s);
  }
  testing_support::ExprGen gen(11, false);
  for (int k = 0; k < 300; ++k) {
    Expr e = gen(5);
    CHECK(parse(to_string(parse(to_string(e)))) == parse(to_string(e)));
  }
}

TEST_CASE("constant jet") {
  WirtingerJet j = eval_jet(Expr::constant({1.5, -2.0}), {{0.3, 0.1}, {-1.0, 2.0}});
  CHECK(j.value() == cplx{1.5, -2.0});
  for (auto m : multi_indices())
    if (m[0] + m[1] + m[2] + m[3] > 0) CHECK(j.d(m[0], m[1], m[2], m[3]) == cplx{});
}

TEST_CASE("lines slope jet matches hand differentiation") {
  Expr e = parse("im(y)/im(x)");
  CPoint p{I, I};
  WirtingerJet j = eval_jet(e, p);
  CHECK(std::abs(j.value() - 1.0) < 1e-15);
  // d/dybar Im(y) / Im(x) = (i/2) / Im x
  CHECK(std::abs(j.d(0, 0, 0, 1) - I / 2.0) < 1e-15);
  CHECK(std::abs(j.d(0, 0, 1, 0) + I / 2.0) < 1e-15);
  // d/dx of Im(x)^-1 = -(1/(2i)) Im(x)^-2 Im(y)
  CHECK(std::abs(j.d(1, 0, 0, 0) - I / 2.0) < 1e-15);
  WirtingerJet f = fd_jet(evaluator(e), p);
  CHECK(max_deviation(j, f) <= 1e-6);
}

TEST_CASE("holomorphic monomial") {
  WirtingerJet j = eval_jet(parse("x*y"), {2.0, 3.0});
  CHECK(j.value() == cplx{6.0});
  CHECK(j.d(1, 0, 0, 0) == cplx{3.0});
  CHECK(j.d(0, 0, 1, 0) == cplx{2.0});
  CHECK(j.d(1, 0, 1, 0) == cplx{1.0});
  CHECK(j.d(2, 0, 0, 0) == cplx{0.0});
  for (auto m : multi_indices())
    if (m[1] + m[3] > 0) CHECK(j.d(m[0], m[1], m[2], m[3]) == cplx{});
}

TEST_CASE("fd oracle sanity") {
  WirtingerJet c = fd_jet([](const CPoint&) { return cplx{2.0, 1.0}; }, {{0.2, 0.4}, {1.0, -1.0}});
  for (auto m : multi_indices())
    if (m[0] + m[1] + m[2] + m[3] > 0) CHECK(std::abs(c.d(m[0], m[1], m[2], m[3])) <= 1e-12);

  WirtingerJet z = fd_jet(evaluator(parse("conj(x)")), {1.0, 0.0});
  CHECK(std::abs(z.d(0, 1, 0, 0) - 1.0) <= 1e-8);
  CHECK(std::abs(z.d(1, 0, 0, 0)) <= 1e-8);

  // second Wirtinger derivatives of |x|^2 |y|^2 by hand
  CPoint p{{0.3, -0.2}, {0.5, 0.7}};
  WirtingerJet q = fd_jet(evaluator(parse("x*conj(x)*y*conj(y)")), p);
  CHECK(std::abs(q.d(1, 1, 0, 0) - std::norm(p.y)) <= 1e-7);
  CHECK(std::abs(q.d(1, 0, 0, 1) - std::conj(p.x) * p.y) <= 1e-7);
  CHECK(std::abs(q.d(0, 0, 2, 0)) <= 1e-7);

  FdOptions rich;
  rich.richardson = true;
  WirtingerJet r = fd_jet(evaluator(parse("exp(x*conj(y))")), p, rich);
  WirtingerJet exact = eval_jet(parse("exp(x*conj(y))"), p);
  CHECK(max_deviation(r, exact) <= 1e-6);
}

TEST_CASE("random expressions agree with finite differences") {
  testing_support::ExprGen gen(2024, false);
  int checked = 0;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    Expr e = gen(6);
    CPoint p = gen.point();
    WirtingerJet a, b;
    try {
      a = eval_jet(e, p);
      b = fd_jet(evaluator(e), p);
    } catch (const DomainError&) {
      continue;
    }
    double rel = max_deviation(a, b) / std::max(1.0, a.max_abs());
    worst = std::max(worst, rel);
    CHECK_MESSAGE(rel <= 1e-5, to_string(e));
    ++checked;
  }
  CHECK(checked >= 990);
  MESSAGE("worst relative deviation " << worst);
}

TEST_CASE("conjugation symmetry") {
  testing_support::ExprGen gen(7, false);
  for (int k = 0; k < 300; ++k) {
    Expr e = gen(5);
    CPoint p = gen.point();
    WirtingerJet a = eval_jet(e, p), c = eval_jet(conj(e), p);
    for (auto m : multi_indices())
      CHECK(c.d(m[0], m[1], m[2], m[3]) == std::conj(a.d(m[1], m[0], m[3], m[2])));
  }
}

TEST_CASE("real valued expressions have hermitian jets") {
  testing_support::ExprGen gen(8, false);
  for (int k = 0; k < 200; ++k) {
    Expr e = gen(4);
    CPoint p = gen.point();
    for (const Expr& r : {re(e), im(e), e * conj(e)}) {
      WirtingerJet j = eval_jet(r, p);
      double scale = std::max(1.0, j.max_abs());
      for (auto m : multi_indices())
        CHECK(std::abs(j.d(m[1], m[0], m[3], m[2]) - std::conj(j.d(m[0], m[1], m[2], m[3]))) <=
              1e-14 * scale);
    }
  }
}

TEST_CASE("holomorphic expressions have vanishing conjugate entries") {
  testing_support::ExprGen gen(9, true);
  for (int k = 0; k < 300; ++k) {
    Expr e = gen(6);
    CHECK(is_holomorphic(e));
    CPoint p = gen.point(0.5);
    WirtingerJet j;
    try {
      j = eval_jet(e, p);
    } catch (const DomainError&) {
      continue;
    }
    for (auto m : multi_indices())
      if (m[1] + m[3] > 0) CHECK(j.d(m[0], m[1], m[2], m[3]) == cplx{});
  }
  CHECK_FALSE(is_holomorphic(parse("x+re(y)")));
  CHECK_FALSE(is_holomorphic(parse("bump(x)")));
  CHECK(is_holomorphic_in_x(parse("x*conj(y)")));
  CHECK_FALSE(is_holomorphic_in_x(parse("conj(x)*y")));
}

TEST_CASE("domain errors name the failing subexpression") {
  auto sub = [](const char* s, CPoint p) -> std::string {
    try {
      eval_jet(parse(s), p);
    } catch (const DomainError& e) {
      return e.subexpression();
    }
    return "<none>";
  };
  CHECK(sub("1/(x-x)", {0.5, 0.0}) == "1/(x-x)");
  CHECK(sub("y+log(x)", {0.0, 1.0}) == "log(x)");
  CHECK(sub("sqrt(x)", {-1.0, 0.0}) == "sqrt(x)");
  CHECK(sub("x^-1", {0.0, 0.0}) == "x^-1");
  CHECK(sub("sqrt(x)", {{-1.0, 1e-300}, 0.0}) == "<none>");
  CHECK_THROWS_AS(eval(parse("log(y)"), {1.0, -2.0}), DomainError);
  CHECK_THROWS_AS(fd_jet(evaluator(parse("1/x")), {0.0, 0.0}), DomainError);
}

TEST_CASE("principal branches") {
  cplx v = eval(parse("sqrt(x)"), {{-1.0, 1e-9}, 0.0});
  CHECK(v.imag() > 0.99);
  cplx w = eval(parse("log(x)"), {{-1.0, -1e-9}, 0.0});
  CHECK(std::abs(w.imag() + M_PI) < 1e-8);
}

TEST_CASE("bump is smooth and compactly supported") {
  Expr e = parse("bump(re(x))");
  CHECK(eval(e, {0.0, 0.0}) == cplx{1.0});
  CHECK(eval(e, {1.0, 0.0}) == cplx{0.0});
  CHECK(eval(e, {-2.0, 0.0}) == cplx{0.0});
  CPoint p{{0.4, 0.3}, 0.0};
  CHECK(max_deviation(eval_jet(e, p), fd_jet(evaluator(e), p)) <= 1e-6);
  CHECK(eval_jet(e, {{1.5, 0.0}, 0.0}).max_abs() == 0.0);
}

TEST_CASE("substitute and structure queries") {
  Expr e = parse("x*y+conj(y)");
  Expr s = substitute(e, parse("2*x"), parse("y+1"));
  CPoint p{{0.3, 0.2}, {0.1, -0.4}};
  CHECK(std::abs(eval(s, p) - eval(e, {2.0 * p.x, p.y + 1.0})) < 1e-15);
  CHECK(depends_on(e, Op::VarY));
  CHECK_FALSE(depends_on(parse("x^2"), Op::VarY));
  CHECK(node_count(parse("x+y")) == 3);
  CHECK(eval(parse("p/x"), {2.0, 5.0}, 4.0) == cplx{2.0});
}

}  // TEST_SUITE
