#include "dq/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dq {

PieceSpec PieceSpec::constant(const Rat& v) {
  PieceSpec p;
  p.kind = Kind::Constant;
  p.value = LogScalar::from_rat(v);
  p.value_exact = v;
  return p;
}

PieceSpec PieceSpec::constant_log(LogScalar v) {
  PieceSpec p;
  p.kind = Kind::Constant;
  p.value = v;
  return p;
}

PieceSpec PieceSpec::affine(double slope, double intercept) {
  PieceSpec p;
  p.kind = Kind::Affine;
  p.slope = slope;
  p.intercept = intercept;
  return p;
}

PiecewiseFunction::PiecewiseFunction(Interval domain, std::vector<Piece> pieces)
    : domain_(std::move(domain)), pieces_(std::move(pieces)) {
  std::sort(pieces_.begin(), pieces_.end(),
            [](const Piece& a, const Piece& b) { return a.dom.lo < b.dom.lo; });
  Rat covered = 0;
  const Rat* prev_hi = nullptr;
  for (const auto& p : pieces_) {
    if (p.dom.lo < domain_.lo || p.dom.hi > domain_.hi)
      throw std::invalid_argument("piecewise: piece outside domain");
    if (prev_hi && p.dom.lo < *prev_hi)
      throw std::invalid_argument("piecewise: overlapping pieces");
    covered += p.dom.length();
    prev_hi = &p.dom.hi;
  }
  null_budget_ = domain_.length() - covered;
  if (null_budget_ < 0) throw std::invalid_argument("piecewise: pieces exceed domain");
}

const Piece* PiecewiseFunction::piece_at(const Rat& x) const {
  size_t lo = 0, hi = pieces_.size();
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (pieces_[mid].dom.lo < x) lo = mid + 1; else hi = mid;
  }
  if (lo == 0) return nullptr;
  const Piece& p = pieces_[lo - 1];
  return p.dom.contains(x) ? &p : nullptr;
}

LogScalar PiecewiseFunction::eval(const Rat& x) const {
  if (x <= domain_.lo || x >= domain_.hi)
    throw std::domain_error("piecewise eval: point outside domain");
  const Piece* p = piece_at(x);
  if (!p) throw UnassignedPoint("piecewise eval: unassigned point " + rat_str(x));
  if (p->spec.kind == PieceSpec::Kind::Constant) return p->spec.value;
  return LogScalar::from_double(p->spec.slope * to_double(x) + p->spec.intercept);
}

std::optional<Rat> PiecewiseFunction::eval_exact(const Rat& x) const {
  const Piece* p = piece_at(x);
  if (!p) return std::nullopt;
  if (p->spec.kind == PieceSpec::Kind::Constant) return p->spec.value_exact;
  return rat_from_double(p->spec.slope) * x + rat_from_double(p->spec.intercept);
}

double PiecewiseFunction::eval_double(double x) const {
  return eval(rat_from_double(x)).to_double();
}

PiecewiseFunction PiecewiseFunction::restricted(const Interval& window) const {
  auto win = dq::intersect(domain_, window);
  if (!win) throw std::invalid_argument("restricted: window misses domain");
  std::vector<Piece> out;
  for (const auto& p : pieces_) {
    if (auto iv = dq::intersect(p.dom, *win)) out.push_back(Piece{*iv, p.spec});
  }
  return PiecewiseFunction(*win, std::move(out));
}

DifferenceQuotient difference_quotient(const PiecewiseFunction& u, const Rat& x,
                                       const Rat& y) {
  if (!(x < y)) throw std::invalid_argument("difference_quotient: requires x < y");
  DifferenceQuotient dq_out;
  dq_out.x = x;
  dq_out.y = y;
  auto ex = u.eval_exact(x);
  auto ey = u.eval_exact(y);
  const Rat gap = y - x;
  if (ex && ey) {
    Rat q = (*ey - *ex) / gap;
    dq_out.exact = q;
    dq_out.value = LogScalar::from_rat(q);
    return dq_out;
  }
  LogScalar vx = u.eval(x);
  LogScalar vy = u.eval(y);
  dq_out.value = (vy - vx) / LogScalar::from_rat(gap);
  return dq_out;
}

PiecewiseFunction build_cantor_function(const SequencePair& seq, int n_max, int depth_cap) {
  if (n_max < 1) throw std::invalid_argument("build_cantor_function: n_max >= 1");
  std::vector<Piece> pieces;
  for (int n = 1; n <= n_max; ++n) {
    IntervalUnion an = cantor_removed(n, depth_cap);
    PieceSpec spec;
    if (n <= seq.exact_limit()) {
      spec = PieceSpec::constant(Rat(seq.k_exact(n)));
    } else {
      spec = PieceSpec::constant_log(seq.k(n));
    }
    for (const auto& part : an.parts()) pieces.push_back(Piece{part, spec});
  }
  return PiecewiseFunction(Interval{Rat(0), Rat(1)}, std::move(pieces));
}

PiecewiseFunction heaviside(const Rat& a, const Rat& b, const Rat& lo_val,
                            const Rat& hi_val) {
  if (!(a < 0 && 0 < b)) throw std::invalid_argument("heaviside: requires a < 0 < b");
  std::vector<Piece> pieces{
      Piece{Interval{a, Rat(0)}, PieceSpec::constant(lo_val)},
      Piece{Interval{Rat(0), b}, PieceSpec::constant(hi_val)},
  };
  return PiecewiseFunction(Interval{a, b}, std::move(pieces));
}

PiecewiseFunction staircase(const Interval& domain, const std::vector<Rat>& values) {
  if (values.empty()) throw std::invalid_argument("staircase: needs at least one step");
  const Rat width = domain.length() / Rat(static_cast<int>(values.size()));
  std::vector<Piece> pieces;
  Rat lo = domain.lo;
  for (size_t k = 0; k < values.size(); ++k) {
    Rat hi = k + 1 == values.size() ? domain.hi : lo + width;
    pieces.push_back(Piece{Interval{lo, hi}, PieceSpec::constant(values[k])});
    lo = hi;
  }
  return PiecewiseFunction(domain, std::move(pieces));
}

PiecewiseFunction single_affine(const Interval& domain, double slope, double intercept) {
  std::vector<Piece> pieces{Piece{domain, PieceSpec::affine(slope, intercept)}};
  return PiecewiseFunction(domain, std::move(pieces));
}

PiecewiseFunction build_phi_mu(const PiecewiseFunction& u, double mu) {
  if (!(mu > 0)) throw std::invalid_argument("build_phi_mu: mu > 0 required");
  std::vector<Piece> pieces;
  for (const auto& p : u.pieces()) {
    if (p.spec.kind == PieceSpec::Kind::Constant) {
      double c = p.spec.value.to_double();
      if (!std::isfinite(c))
        throw std::invalid_argument("build_phi_mu: piece value overflows doubles");
      pieces.push_back(Piece{p.dom, PieceSpec::affine(1.0, -c / mu)});
    } else {
      pieces.push_back(Piece{
          p.dom, PieceSpec::affine(1.0 - p.spec.slope / mu, -p.spec.intercept / mu)});
    }
  }
  return PiecewiseFunction(u.domain(), std::move(pieces));
}

QuotientBoundsReport quotient_bounds_check(const SequencePair& seq, int i, int j,
                                           int samples, std::uint64_t seed) {
  if (!(1 <= i && i < j)) throw std::invalid_argument("quotient_bounds_check: 1 <= i < j");
  if (j > seq.exact_limit())
    throw std::invalid_argument("quotient_bounds_check: j beyond exact big-integer range");
  const Rat delta{mpz_class(seq.k_exact(j) - seq.k_exact(i))};
  const Rat lower_bound{mpz_class(seq.mu_exact(j - 1) + 3)};
  const Rat upper_bound{mpz_class(seq.mu_exact(j))};

  IntervalUnion ai = cantor_removed(i);
  IntervalUnion aj = cantor_removed(j);

  QuotientBoundsReport rep;
  rep.i = i;
  rep.j = j;
  std::optional<Rat> min_lo_ratio, min_up_ratio;

  auto check_pair = [&](const Rat& x, const Rat& y) {
    Rat gap = x < y ? y - x : x - y;
    Rat q = delta / gap;
    if (q < lower_bound || q > upper_bound) ++rep.violations;
    Rat lo_ratio = q / lower_bound;
    Rat up_ratio = upper_bound / q;
    if (!min_lo_ratio || lo_ratio < *min_lo_ratio) min_lo_ratio = lo_ratio;
    if (!min_up_ratio || up_ratio < *min_up_ratio) min_up_ratio = up_ratio;
    ++rep.checked;
  };

  for (const auto& I : ai.parts()) {
    for (const auto& J : aj.parts()) {
      const Rat xs[2] = {I.lo, I.hi};
      const Rat ys[2] = {J.lo, J.hi};
      for (const auto& x : xs)
        for (const auto& y : ys) check_pair(x, y);
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> bits(1, (1ull << 20) - 1);
  std::uniform_int_distribution<size_t> pick_i(0, ai.size() - 1);
  std::uniform_int_distribution<size_t> pick_j(0, aj.size() - 1);
  const Rat denom(std::int64_t(1) << 20);
  for (int s = 0; s < samples; ++s) {
    const Interval& I = ai.parts()[pick_i(rng)];
    const Interval& J = aj.parts()[pick_j(rng)];
    Rat rx = Rat(static_cast<long>(bits(rng))) / denom;  // dyadic in (0,1)
    Rat ry = Rat(static_cast<long>(bits(rng))) / denom;
    check_pair(I.lo + I.length() * rx, J.lo + J.length() * ry);
  }

  rep.min_lower_ratio = min_lo_ratio ? to_double(*min_lo_ratio) : 0.0;
  rep.min_upper_ratio = min_up_ratio ? to_double(*min_up_ratio) : 0.0;
  return rep;
}

nlohmann::json PiecewiseFunction::to_json() const {
  nlohmann::json j;
  j["domain"] = {rat_str(domain_.lo), rat_str(domain_.hi)};
  auto arr = nlohmann::json::array();
  for (const auto& p : pieces_) {
    nlohmann::json pj;
    pj["lo"] = rat_str(p.dom.lo);
    pj["hi"] = rat_str(p.dom.hi);
    if (p.spec.kind == PieceSpec::Kind::Constant) {
      pj["kind"] = "const";
      if (p.spec.value_exact) {
        pj["value"] = rat_str(*p.spec.value_exact);
      } else {
        pj["sign"] = p.spec.value.sign();
        pj["log_mag"] = p.spec.value.log_mag();
      }
    } else {
      pj["kind"] = "affine";
      pj["slope"] = p.spec.slope;
      pj["intercept"] = p.spec.intercept;
    }
    arr.push_back(pj);
  }
  j["pieces"] = arr;
  return j;
}

PiecewiseFunction PiecewiseFunction::from_json(const nlohmann::json& j) {
  Interval dom{rat_parse(j.at("domain")[0].get<std::string>()),
               rat_parse(j.at("domain")[1].get<std::string>())};
  std::vector<Piece> pieces;
  for (const auto& pj : j.at("pieces")) {
    Interval iv{rat_parse(pj.at("lo").get<std::string>()),
                rat_parse(pj.at("hi").get<std::string>())};
    PieceSpec spec;
    std::string kind = pj.at("kind").get<std::string>();
    if (kind == "const") {
      if (pj.contains("value")) {
        spec = PieceSpec::constant(rat_parse(pj["value"].get<std::string>()));
      } else {
        spec = PieceSpec::constant_log(
            LogScalar::from_log(pj.at("sign").get<int>(), pj.at("log_mag").get<double>()));
      }
    } else if (kind == "affine") {
      spec = PieceSpec::affine(pj.at("slope").get<double>(), pj.at("intercept").get<double>());
    } else {
      throw std::invalid_argument("piecewise from_json: unknown kind " + kind);
    }
    pieces.push_back(Piece{iv, spec});
  }
  return PiecewiseFunction(dom, std::move(pieces));
}

}  // namespace dq
