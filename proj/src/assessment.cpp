#include "phm/assessment.hpp"

#include <complex>

namespace phm {

Vec assessment_grid(const AssessmentOptions& opts) {
  require(opts.grid_points >= 2 && opts.f_min > 0 && opts.f_max > opts.f_min,
          "bad assessment grid");
  Vec f(opts.grid_points);
  double l0 = std::log10(opts.f_min), l1 = std::log10(opts.f_max);
  for (Index i = 0; i < opts.grid_points; ++i)
    f[i] = std::pow(10.0, l0 + (l1 - l0) * double(i) / double(opts.grid_points - 1));
  return f;
}

namespace {

// linear interpolation of y at the x where series crosses `level`
double interp_crossing(double x0, double x1, double v0, double v1,
                       double level) {
  double w = (level - v0) / (v1 - v0);
  return x0 + w * (x1 - x0);
}

}  // namespace

MarginsRecord margins_from_bode(const BodeData& bode, const Requirements& reqs) {
  const Index n = bode.freq.size();
  require(n >= 2, "margins need at least 2 grid points");
  MarginsRecord rec;

  // closed-loop cutoff: first -3 dB crossing, log-frequency interpolation
  Vec logf = bode.freq.array().log10();
  rec.cutoff_hz = bode.freq[n - 1];
  rec.cutoff_in_grid = false;
  if (bode.gain_db[0] <= -3.0) {
    rec.cutoff_hz = bode.freq[0];
    rec.cutoff_in_grid = true;
  } else {
    for (Index i = 1; i < n; ++i) {
      if (bode.gain_db[i] <= -3.0) {
        double lf = interp_crossing(logf[i - 1], logf[i], bode.gain_db[i - 1],
                                    bode.gain_db[i], -3.0);
        rec.cutoff_hz = std::pow(10.0, lf);
        rec.cutoff_in_grid = true;
        break;
      }
    }
  }

  // open-loop reconstruction G = H / (1 - H); ill-posed points excluded
  std::vector<double> ol_logf, ol_gain_db, ol_phase;
  double prev_phase = 0.0;
  bool have_prev = false;
  for (Index i = 0; i < n; ++i) {
    std::complex<double> h =
        std::polar(std::pow(10.0, bode.gain_db[i] / 20.0),
                   bode.phase_deg[i] * M_PI / 180.0);
    std::complex<double> den = 1.0 - h;
    if (std::abs(den) < 1e-3) continue;
    std::complex<double> g = h / den;
    double ph = std::arg(g) * 180.0 / M_PI;
    if (have_prev) {
      while (ph - prev_phase > 180.0) ph -= 360.0;
      while (ph - prev_phase < -180.0) ph += 360.0;
    }
    prev_phase = ph;
    have_prev = true;
    ol_logf.push_back(logf[i]);
    ol_gain_db.push_back(20.0 * std::log10(std::max(std::abs(g), 1e-12)));
    ol_phase.push_back(ph);
  }

  for (std::size_t i = 1; i < ol_logf.size(); ++i) {
    // phase margin at the first downward 0 dB crossing
    if (!std::isfinite(rec.phase_margin_deg) && ol_gain_db[i - 1] > 0.0 &&
        ol_gain_db[i] <= 0.0) {
      double ph = ol_phase[i - 1] + (0.0 - ol_gain_db[i - 1]) /
                                 (ol_gain_db[i] - ol_gain_db[i - 1]) *
                                 (ol_phase[i] - ol_phase[i - 1]);
      rec.phase_margin_deg = 180.0 + ph;
    }
    // gain margin at the first -180 deg crossing
    if (!std::isfinite(rec.gain_margin_db) &&
        (ol_phase[i - 1] + 180.0) * (ol_phase[i] + 180.0) <= 0.0 &&
        ol_phase[i] != ol_phase[i - 1]) {
      double g = ol_gain_db[i - 1] + (-180.0 - ol_phase[i - 1]) /
                                         (ol_phase[i] - ol_phase[i - 1]) *
                                         (ol_gain_db[i] - ol_gain_db[i - 1]);
      rec.gain_margin_db = -g;
    }
  }

  bool ok = rec.gain_margin_db >= reqs.min_gain_margin_db &&
            rec.phase_margin_deg >= reqs.min_phase_margin_deg &&
            rec.cutoff_hz >= reqs.min_cutoff_hz;
  rec.label = ok ? HealthLabel::healthy : HealthLabel::faulty;
  return rec;
}

MarginsRecord assess_full(const FaultVector& fault, const ActuatorParams& params,
                          const Requirements& reqs,
                          const AssessmentOptions& opts) {
  BodeData bode =
      frequency_response(fault, params, assessment_grid(opts), opts.probe_amplitude);
  return margins_from_bode(bode, reqs);
}

}  // namespace phm
