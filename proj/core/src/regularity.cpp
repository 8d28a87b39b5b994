#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "efron/efron.hpp"
#include "efron/error.hpp"

namespace efron {

namespace {

constexpr double kInfSlope = std::numeric_limits<double>::infinity();

double envelope(const ConditionalSlice& sl, const PsiFunction* psi, double x) {
  const JointModel2D& m = sl.model();
  const double y = sl.s() - x;
  const double e = std::abs(m.d1(x, y)) + std::abs(m.d2(x, y)) + std::abs(m.d11(x, y) - m.d12(x, y)) +
                   std::abs(m.d22(x, y) - m.d12(x, y));
  const double w = psi ? 1.0 + std::abs(psi->value(x, y)) : 1.0;
  return e * w * sl.mu1().pdf(x);
}

// Log-log slope of the envelope between two tail quantiles, measured from the median.
double tail_slope(const ConditionalSlice& sl, const PsiFunction* psi, bool upper) {
  const Measure1D& mu = sl.mu1();
  const double med = mu.median();
  const double xa = mu.quantile(upper ? 1.0 - 1e-5 : 1e-5);
  const double xb = mu.quantile(upper ? 1.0 - 1e-8 : 1e-8);
  const double ra = std::abs(xa - med), rb = std::abs(xb - med);
  if (!(rb > 1.01 * ra) || ra == 0.0) return -kInfSlope;
  const double ea = envelope(sl, psi, xa), eb = envelope(sl, psi, xb);
  if (!(eb > 0.0)) return -kInfSlope;
  if (!(ea > 0.0)) return 0.0;
  return (std::log(eb) - std::log(ea)) / (std::log(rb) - std::log(ra));
}

}  // namespace

RegularityReport check_regularity(const JointModel2D& model, double s0, const PsiFunction* psi,
                                  const RegularityOptions& opt) {
  if (!(opt.eps > 0.0) || !std::isfinite(opt.eps)) throw Error(ErrorCode::BadParameter, "regularity eps must be > 0");
  RegularityReport rep;
  auto warn = [&rep](const std::string& w) {
    rep.ok = false;
    if (std::find(rep.warnings.begin(), rep.warnings.end(), w) == rep.warnings.end()) rep.warnings.push_back(w);
  };
  const double e = opt.eps;
  for (double s : {s0 - e, s0 - 0.5 * e, s0, s0 + 0.5 * e, s0 + e}) {
    std::optional<ConditionalSlice> sl;
    try {
      sl.emplace(model, s);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::EmptySlice && err.code() != ErrorCode::NormalizationFailure) throw;
      std::ostringstream os;
      os << "regularity: no slice at s=" << s;
      warn(os.str());
      continue;
    }
    const Interval r = sl->x_range();
    for (bool upper : {false, true}) {
      if (upper ? r.upper_finite() : r.lower_finite()) continue;
      if (tail_slope(*sl, psi, upper) >= -1.0) {
        std::ostringstream os;
        os << "regularity: " << (upper ? "upper" : "lower") << " tail envelope decays too slowly near s=" << s0;
        warn(os.str());
      }
    }
    const bool lo_m = sl->lower_end_moves(), hi_m = sl->upper_end_moves();
    if (lo_m || hi_m) {
      const Measure1D& mu = sl->mu1();
      double peak = 0.0;
      for (int i = 1; i < 16; ++i) peak = std::max(peak, mu.pdf(mu.quantile(i / 16.0)));
      const double off = 1e-7 * (r.hi - r.lo);
      const bool bad_lo = lo_m && mu.pdf(r.lo + off) > 1e-6 * peak;
      const bool bad_hi = hi_m && mu.pdf(r.hi - off) > 1e-6 * peak;
      if (bad_lo || bad_hi) {
        warn("regularity: slice density does not vanish at an end that moves with s; the kernel formulas omit the "
             "boundary term");
      }
    }
  }
  return rep;
}

}  // namespace efron
