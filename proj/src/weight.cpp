#include "dq/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dq/quadrature.hpp"

namespace dq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_offset(double log_mu_i, double s) {
  // log(mu_i + s) = log mu_i + log1p(s / mu_i), robust when s/mu_i underflows
  double ratio = s * std::exp(-log_mu_i);
  return log_mu_i + std::log1p(ratio);
}
}  // namespace

Weight Weight::power_law(double theta) {
  if (theta <= 0) throw std::invalid_argument("power_law: theta > 0 required");
  Weight w;
  w.family_ = Family::PowerLaw;
  w.theta_ = theta;
  return w;
}

Weight Weight::linear() {
  Weight w;
  w.family_ = Family::Linear;
  w.theta_ = 1.0;
  return w;
}

Weight Weight::counterexample(SequencePair seq, int n_segments) {
  Weight w;
  w.family_ = Family::CounterexampleOmega;
  w.seq_ = std::move(seq);
  w.build_counterexample_segments(n_segments);
  return w;
}

Weight Weight::table(std::vector<std::pair<double, double>> knots) {
  if (knots.empty() || knots.front().first != 0.0 || knots.front().second != 0.0)
    throw std::invalid_argument("table weight: first knot must be (0, 0)");
  for (size_t k = 0; k + 1 < knots.size(); ++k)
    if (knots[k + 1].first <= knots[k].first)
      throw std::invalid_argument("table weight: knots must be increasing in mu");
  for (size_t k = 1; k < knots.size(); ++k)
    if (knots[k].second <= 0)
      throw std::invalid_argument("table weight: omega must be positive for mu > 0");
  Weight w;
  w.family_ = Family::PiecewiseTable;
  w.knots_ = std::move(knots);
  return w;
}

const SequencePair& Weight::sequence() const {
  if (!seq_) throw std::logic_error("weight has no sequence");
  return *seq_;
}

void Weight::build_counterexample_segments(int n_segments) {
  const SequencePair& sq = *seq_;
  const int n_hi = std::max(2, n_segments);
  segs_.clear();

  double lmu1 = sq.log_mu(1);
  // mu_{i+1} > mu_i + 3 must hold for the window layout to make sense
  for (int i = 1; i < n_hi; ++i) {
    if (sq.log_mu(i + 1) <= log_offset(sq.log_mu(i), 3.0))
      throw std::invalid_argument("counterexample weight: mu_{i+1} <= mu_i + 3 at i=" +
                                  std::to_string(i));
  }

  Seg ramp{Seg::Ramp, -kInf, log_offset(lmu1, 1.0), 1, 0.0, 1.0, 0.0, 0.0, std::exp(lmu1)};
  segs_.push_back(ramp);

  for (int i = 1; i < n_hi; ++i) {
    double lmu = sq.log_mu(i);
    // prefer the correctly rounded big-integer value of mu_i when we have it
    double mu_base = lmu < 700 ? std::exp(lmu) : kInf;
    if (i <= sq.exact_limit()) {
      double d = mpz_get_d(sq.mu_exact(i).get_mpz_t());
      if (std::isfinite(d)) mu_base = d;
    }
    double l0 = lmu, l1 = log_offset(lmu, 1.0), l2 = log_offset(lmu, 2.0),
           l3 = log_offset(lmu, 3.0);
    double sq_lo = 2.0 * l1, sq_hi = 2.0 * l2;
    double ex_lo = std::pow(l3, 0.25);
    double ex_at0 = std::pow(l0, 0.25);
    if (i >= 2) {
      // glue [mu_i, mu_i + 1], from the previous exp value up to mu^2
      segs_.push_back({Seg::Glue, l0, l1, i, 0.0, 1.0, ex_at0, sq_lo, mu_base});
    }
    segs_.push_back({Seg::Square, l1, l2, i, 1.0, 2.0, sq_lo, sq_hi, mu_base});
    segs_.push_back({Seg::Glue, l2, l3, i, 2.0, 3.0, sq_hi, ex_lo, mu_base});
    segs_.push_back({Seg::Exp, l3, sq.log_mu(i + 1), i, 3.0, kInf, 0.0, 0.0, mu_base});
  }
  seg_hi_.clear();
  seg_hi_.reserve(segs_.size());
  for (const auto& s : segs_) seg_hi_.push_back(s.log_hi);
}

const Weight::Seg& Weight::segment_for(double log_mu) const {
  // first segment whose upper endpoint lies strictly above log_mu; at a
  // collapsed window this lands on the exp branch, the continuous choice
  auto it = std::upper_bound(seg_hi_.begin(), seg_hi_.end(), log_mu);
  if (it == seg_hi_.end()) return segs_.back();
  return segs_[static_cast<size_t>(it - seg_hi_.begin())];
}

LogScalar Weight::eval_log_counterexample(double log_mu) const {
  const Seg& s = segment_for(log_mu);
  switch (s.kind) {
    case Seg::Ramp: {
      double lmu1p1 = log_offset(seq_->log_mu(1), 1.0);
      return LogScalar::from_log(1, lmu1p1 + log_mu);
    }
    case Seg::Square:
      return LogScalar::from_log(1, 2.0 * log_mu);
    case Seg::Exp:
      return LogScalar::from_log(1, std::pow(log_mu, 0.25));
    case Seg::Glue: {
      if (!std::isfinite(s.mu_base))
        return LogScalar::from_log(1, std::pow(log_mu, 0.25));  // unreachable window
      double mu = std::exp(log_mu);
      double t = std::clamp((mu - s.mu_base - s.s_lo) / (s.s_hi - s.s_lo), 0.0, 1.0);
      LogScalar lo = LogScalar::from_log(1, s.w_lo_log);
      LogScalar hi = LogScalar::from_log(1, s.w_hi_log);
      return lo * LogScalar::from_double(1.0 - t) + hi * LogScalar::from_double(t);
    }
  }
  return LogScalar::zero();
}

LogScalar Weight::eval_log(double log_mu) const {
  switch (family_) {
    case Family::PowerLaw:
    case Family::Linear:
      return LogScalar::from_log(1, theta_ * log_mu);
    case Family::CounterexampleOmega:
      return eval_log_counterexample(log_mu);
    case Family::PiecewiseTable: {
      double last = knots_.back().first;
      if (log_mu >= std::log(last)) return LogScalar::from_double(knots_.back().second);
      return LogScalar::from_double(eval(std::exp(log_mu)));
    }
  }
  return LogScalar::zero();
}

double Weight::eval(double mu) const {
  if (mu < 0) throw std::domain_error("omega: negative argument");
  if (mu == 0) return 0.0;
  switch (family_) {
    case Family::PowerLaw:
    case Family::Linear:
      return std::pow(mu, theta_);
    case Family::PiecewiseTable: {
      if (mu >= knots_.back().first) return knots_.back().second;
      auto it = std::upper_bound(knots_.begin(), knots_.end(), mu,
                                 [](double v, const auto& k) { return v < k.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      double t = (mu - lo.first) / (hi.first - lo.first);
      return lo.second + t * (hi.second - lo.second);
    }
    case Family::CounterexampleOmega: {
      // independent linear-domain path (the log path is the contract for
      // huge mu; both must agree where doubles reach)
      const Seg& s = segment_for(std::log(mu));
      switch (s.kind) {
        case Seg::Ramp:
          return (std::exp(seq_->log_mu(1)) + 1.0) * mu;
        case Seg::Square:
          return mu * mu;
        case Seg::Exp:
          return std::exp(std::pow(std::log(mu), 0.25));
        case Seg::Glue: {
          if (!std::isfinite(s.mu_base)) return std::exp(std::pow(std::log(mu), 0.25));
          double t = std::clamp((mu - s.mu_base - s.s_lo) / (s.s_hi - s.s_lo), 0.0, 1.0);
          return std::exp(s.w_lo_log) * (1.0 - t) + std::exp(s.w_hi_log) * t;
        }
      }
      return 0.0;
    }
  }
  return 0.0;
}

std::vector<double> Weight::breakpoints_log(double log_lo, double log_hi) const {
  std::vector<double> out;
  if (family_ == Family::CounterexampleOmega) {
    for (const auto& s : segs_) {
      if (s.log_lo > log_lo && s.log_lo < log_hi) out.push_back(s.log_lo);
      if (s.log_lo > log_hi) break;
    }
  } else if (family_ == Family::PiecewiseTable) {
    for (const auto& k : knots_) {
      if (k.first <= 0) continue;
      double l = std::log(k.first);
      if (l > log_lo && l < log_hi) out.push_back(l);
    }
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::pair<LogScalar, LogScalar> Weight::range_log(double log_lo, double log_hi) const {
  // every family is monotone between joints, so the extrema sit at the
  // endpoints or at interior joints
  std::vector<double> cand{log_lo, log_hi};
  for (double b : breakpoints_log(log_lo, log_hi)) cand.push_back(b);
  LogScalar mn, mx;
  bool first = true;
  for (double c : cand) {
    LogScalar v = eval_log(c);
    if (first || v < mn) mn = v;
    if (first || mx < v) mx = v;
    first = false;
  }
  return {mn, mx};
}

double Weight::unit_window_integral(int i) const {
  if (family_ != Family::CounterexampleOmega)
    throw std::logic_error("unit_window_integral: counterexample family only");
  if (i < 1) throw std::invalid_argument("unit_window_integral: i >= 1");
  // int_{mu_i+1}^{mu_i+2} omega/mu^2 = int 1 dmu over a width-1 window
  return (2.0 - 1.0);
}

double Weight::log_omega_at_offset(int i, double s, int side) const {
  if (family_ != Family::CounterexampleOmega)
    throw std::logic_error("log_omega_at_offset: counterexample family only");
  const double lmu = seq_->log_mu(i);
  const double lm = log_offset(lmu, s);
  // pick the segment: joints (s in {0,1,2,3}) go to the side asked for
  auto in_square = [&] { return s > 1.0 && s < 2.0; };
  auto in_exp = [&] { return s > 3.0; };
  bool at0 = s == 0.0, at1 = s == 1.0, at2 = s == 2.0, at3 = s == 3.0;
  if (in_square() || (at1 && side > 0) || (at2 && side < 0)) return 2.0 * lm;
  if (in_exp() || (at3 && side > 0) || (at0 && side < 0)) return std::pow(lm, 0.25);
  // glue interiors and glue-facing joint sides: interpolate the endpoints
  double s0 = (s < 1.0 || (at1 && side < 0)) ? 0.0 : 2.0;
  double w0 = s0 == 0.0 ? std::pow(log_offset(lmu, 0.0), 0.25) : 2.0 * log_offset(lmu, 2.0);
  double w1 = s0 == 0.0 ? 2.0 * log_offset(lmu, 1.0) : std::pow(log_offset(lmu, 3.0), 0.25);
  double t = s - s0;
  LogScalar v = LogScalar::from_log(1, w0) * LogScalar::from_double(1.0 - t) +
                LogScalar::from_log(1, w1) * LogScalar::from_double(t);
  return v.log_mag();
}

IntegralResult Weight::integral_condition_partial(double mu_lo, double mu_hi) const {
  if (!(1.0 <= mu_lo && mu_lo < mu_hi))
    throw std::invalid_argument("integral_condition_partial: need 1 <= mu_lo < mu_hi");
  IntegralResult out;
  switch (family_) {
    case Family::PowerLaw:
    case Family::Linear: {
      if (theta_ == 1.0) {
        out.value = std::log(mu_hi / mu_lo);
      } else {
        out.value = (std::pow(mu_hi, theta_ - 1.0) - std::pow(mu_lo, theta_ - 1.0)) /
                    (theta_ - 1.0);
      }
      out.err_bound = 4 * std::numeric_limits<double>::epsilon() * std::fabs(out.value);
      return out;
    }
    case Family::PiecewiseTable: {
      // omega affine per knot panel, constant past the last knot
      double total = 0;
      auto seg_int = [](double c, double d, double a, double b) {
        // int (c + d mu)/mu^2 over [a, b]
        return c * (1.0 / a - 1.0 / b) + d * std::log(b / a);
      };
      for (size_t k = 0; k + 1 < knots_.size(); ++k) {
        double a = std::max(mu_lo, knots_[k].first);
        double b = std::min(mu_hi, knots_[k + 1].first);
        if (a >= b) continue;
        double slope = (knots_[k + 1].second - knots_[k].second) /
                       (knots_[k + 1].first - knots_[k].first);
        double c = knots_[k].second - slope * knots_[k].first;
        total += seg_int(c, slope, a, b);
      }
      double a = std::max(mu_lo, knots_.back().first);
      if (a < mu_hi) total += seg_int(knots_.back().second, 0.0, a, mu_hi);
      out.value = total;
      out.err_bound = 1e-14 * std::fabs(total);
      return out;
    }
    case Family::CounterexampleOmega:
      break;
  }

  const double llo = std::log(mu_lo), lhi = std::log(mu_hi);
  QuadratureConfig qc;
  qc.rel_tol = 1e-10;
  qc.abs_tol = 1e-13;
  for (const auto& s : segs_) {
    double a = std::max(llo, s.log_lo);
    double b = std::min(lhi, s.log_hi);
    bool window_inside = s.log_lo >= llo && s.log_hi <= lhi;
    if (a >= b && !(window_inside && s.log_lo == s.log_hi)) continue;
    switch (s.kind) {
      case Seg::Ramp: {
        // omega = (mu_1 + 1) mu  =>  integrand (mu_1 + 1)/mu
        double c = std::exp(log_offset(seq_->log_mu(1), 1.0));
        out.value += c * (b - a);
        break;
      }
      case Seg::Square: {
        if (std::isfinite(s.mu_base) && s.log_hi > s.log_lo) {
          double wlo = std::max(mu_lo, s.mu_base + s.s_lo);
          double whi = std::min(mu_hi, s.mu_base + s.s_hi);
          out.value += std::max(0.0, whi - wlo);
          out.err_bound += 4e-16 * s.mu_base;  // window-position rounding
        } else if (window_inside) {
          out.value += 1.0;  // collapsed window fully inside the range
        }
        break;
      }
      case Seg::Glue: {
        if (std::isfinite(s.mu_base) && s.mu_base < 1e14 && s.log_hi > s.log_lo) {
          double wlo = std::max(mu_lo, s.mu_base + s.s_lo);
          double whi = std::min(mu_hi, s.mu_base + s.s_hi);
          if (wlo < whi) {
            double v0 = std::exp(s.w_lo_log), v1 = std::exp(s.w_hi_log);
            double slope = (v1 - v0) / (s.s_hi - s.s_lo);
            double c = v0 - slope * (s.mu_base + s.s_lo);
            out.value += c * (1.0 / wlo - 1.0 / whi) + slope * std::log(whi / wlo);
          }
        } else if (window_inside) {
          // width-1 window at huge mu: midpoint value over mu^2, off by O(3/mu)
          LogScalar avg = (LogScalar::from_log(1, s.w_lo_log) +
                           LogScalar::from_log(1, s.w_hi_log)) /
                          LogScalar::from_double(2.0);
          double lmu = s.log_lo;
          double v = std::exp(avg.log_mag() - 2.0 * lmu);
          out.value += v;
          out.err_bound += v * 4.0 * std::exp(-lmu);
        }
        break;
      }
      case Seg::Exp: {
        // substitute s = log mu: int exp(s^{1/4} - s) ds
        double hi_eff = std::min(b, a + 80.0);
        QuadResult r = integrate_adaptive(
            [](double t) { return std::exp(std::pow(t, 0.25) - t); }, a, hi_eff, qc);
        out.value += r.value;
        out.err_bound += r.err;
        if (hi_eff < b) out.err_bound += 2.0 * std::exp(std::pow(hi_eff, 0.25) - hi_eff);
        break;
      }
    }
  }
  return out;
}

GrowthReport growth_check(const Weight& w, double theta, std::span<const double> log_mu_grid) {
  if (theta <= 0) throw std::invalid_argument("growth_check: theta > 0 required");
  GrowthReport rep;
  rep.theta = theta;
  double prev = -kInf;
  double prev_lm = -kInf;
  rep.strictly_increasing = true;
  for (double lm : log_mu_grid) {
    if (lm <= 1.0) throw std::invalid_argument("growth_check: grid requires log mu > 1");
    if (lm <= prev_lm) throw std::invalid_argument("growth_check: grid must be increasing");
    prev_lm = lm;
    double gap = w.eval_log(lm).log_mag() - theta * std::log(lm);
    rep.log_mu.push_back(lm);
    rep.gap.push_back(gap);
    if (gap <= prev) rep.strictly_increasing = false;
    prev = gap;
  }
  return rep;
}

Weight Weight::from_json(const nlohmann::json& j) {
  std::string fam = j.at("family").get<std::string>();
  if (fam == "powerlaw") return power_law(j.at("theta").get<double>());
  if (fam == "linear") return linear();
  if (fam == "counterexample") {
    SequenceSpec spec;
    int n_max = 64;
    if (j.contains("sequence")) {
      const auto& js = j["sequence"];
      if (js.contains("preset")) {
        spec = SequenceSpec::preset(js["preset"].get<std::string>());
      } else {
        spec.c2 = js.value("c2", 1);
        spec.c1 = js.value("c1", 0);
        spec.c0 = js.value("c0", 0);
        spec.mu_pow3 = js.value("mu_pow3", 1);
        spec.name = js.value("name", "custom");
      }
      n_max = js.value("n_max", 64);
    }
    return counterexample(SequencePair(spec, n_max));
  }
  if (fam == "table") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : j.at("points")) knots.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
    return table(std::move(knots));
  }
  throw std::invalid_argument("unknown weight family: " + fam);
}

nlohmann::json Weight::to_json() const {
  nlohmann::json j;
  switch (family_) {
    case Family::PowerLaw:
      j["family"] = "powerlaw";
      j["theta"] = theta_;
      break;
    case Family::Linear:
      j["family"] = "linear";
      break;
    case Family::CounterexampleOmega: {
      j["family"] = "counterexample";
      const auto& sp = seq_->spec();
      j["sequence"] = {{"name", sp.name}, {"c2", sp.c2},      {"c1", sp.c1},
                       {"c0", sp.c0},     {"mu_pow3", sp.mu_pow3}, {"n_max", seq_->n_max()}};
      break;
    }
    case Family::PiecewiseTable: {
      j["family"] = "table";
      auto arr = nlohmann::json::array();
      for (const auto& k : knots_) arr.push_back({k.first, k.second});
      j["points"] = arr;
      break;
    }
  }
  return j;
}

}  // namespace dq
