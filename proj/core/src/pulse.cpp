#include "pulseforge/pulse.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace pulseforge {

Pulse::Pulse(double total_time_ns, RealMatrix amplitudes)
    : total_time(total_time_ns), amps(std::move(amplitudes)) {
  if (!(total_time > 0.0) || amps.cols() < 1 || amps.rows() < 1 || amps.rows() > 2) {
    throw ConfigError("Pulse: need total_time > 0, >= 1 pixel and 1 or 2 quadratures");
  }
}

Pulse::Pulse(double total_time_ns, int quadratures, int n_pixels)
    : Pulse(total_time_ns, RealMatrix::Zero(quadratures, n_pixels)) {}

RealVector Pulse::flatten() const {
  RealVector theta(amps.size());
  for (int q = 0; q < quadratures(); ++q) {
    theta.segment(static_cast<Eigen::Index>(q) * n_pixels(), n_pixels()) = amps.row(q).transpose();
  }
  return theta;
}

Pulse Pulse::unflatten(double total_time_ns, int quadratures, const RealVector& theta) {
  const auto n = static_cast<int>(theta.size() / quadratures);
  RealMatrix amps(quadratures, n);
  for (int q = 0; q < quadratures; ++q) {
    amps.row(q) = theta.segment(static_cast<Eigen::Index>(q) * n, n).transpose();
  }
  return Pulse(total_time_ns, std::move(amps));
}

int pixels_for(double total_time, double dt) {
  if (!(total_time > 0.0) || !(dt > 0.0)) {
    throw ConfigError("pixels_for: total time and pixel width must be positive");
  }
  return std::max(1, static_cast<int>(std::lround(total_time / dt)));
}

Pulse flat_top_gaussian(int n_pixels, double total_time, double peak, int ramp_pixels) {
  if (n_pixels < 1 || ramp_pixels < 0 || 2 * ramp_pixels > n_pixels) {
    throw ConfigError("flat_top_gaussian: need 0 <= 2 * ramp_pixels <= n_pixels");
  }
  Pulse p(total_time, 1, n_pixels);
  const double tau = p.tau();
  const double ramp_end = ramp_pixels * tau;
  const double sigma = 0.5 * ramp_end;
  for (int k = 0; k < n_pixels; ++k) {
    p.amps(0, k) = peak;
  }
  for (int k = 0; k < ramp_pixels; ++k) {
    const double t = (k + 0.5) * tau;
    const double x = (t - ramp_end) / sigma;
    const double value = peak * std::exp(-0.5 * x * x);
    p.amps(0, k) = value;
    p.amps(0, n_pixels - 1 - k) = value;
  }
  return p;
}

Pulse with_quadratures(const Pulse& p, int quadratures) {
  if (quadratures < 1 || quadratures > 2) {
    throw ConfigError("with_quadratures: 1 or 2 quadratures supported");
  }
  RealMatrix amps = RealMatrix::Zero(quadratures, p.n_pixels());
  const int keep = std::min(quadratures, p.quadratures());
  amps.topRows(keep) = p.amps.topRows(keep);
  for (int q = keep; q < p.quadratures(); ++q) {
    if (p.amps.row(q).cwiseAbs().maxCoeff() != 0.0) {
      throw ConfigError("with_quadratures: dropping a nonzero quadrature");
    }
  }
  return Pulse(p.total_time, std::move(amps));
}

RealMatrix transfer_matrix(int n_pixels, double total_time, const FilterSpec& f) {
  if (f.sigma < 0.0 || f.oversample < 1) {
    throw ConfigError("FilterSpec: need sigma >= 0 and oversample >= 1");
  }
  const int n_fine = n_pixels * f.oversample;
  const double tau = total_time / n_pixels;
  const double fine_tau = total_time / n_fine;
  RealMatrix t = RealMatrix::Zero(n_fine, n_pixels);
  const double scale = std::sqrt(2.0) * f.sigma;
  for (int l = 0; l < n_fine; ++l) {
    const double centre = (l + 0.5) * fine_tau;
    for (int k = 0; k < n_pixels; ++k) {
      const double lo = k * tau - centre;
      const double hi = (k + 1) * tau - centre;
      if (scale == 0.0) {
        t(l, k) = (lo < 0.0 && hi > 0.0) ? 1.0 : 0.0;
      } else {
        t(l, k) = 0.5 * (std::erf(hi / scale) - std::erf(lo / scale));
      }
    }
  }
  return t;
}

Pulse apply_filter(const Pulse& p, const FilterSpec& f) {
  const RealMatrix t = transfer_matrix(p.n_pixels(), p.total_time, f);
  return Pulse(p.total_time, p.amps * t.transpose());
}

ClampReport clamp_check(const Pulse& p, double bound) {
  ClampReport report;
  for (int q = 0; q < p.quadratures(); ++q) {
    for (int k = 0; k < p.n_pixels(); ++k) {
      if (!(std::abs(p.amps(q, k)) <= bound)) {
        report.ok = false;
        report.violations.emplace_back(q, k);
      }
    }
  }
  return report;
}

void write_pulse_csv(std::ostream& out, const Pulse& p) {
  out << "t_start_ns,duration_ns,amp_x_GHz,amp_y_GHz\n";
  out << std::setprecision(17);
  const double tau = p.tau();
  for (int k = 0; k < p.n_pixels(); ++k) {
    const double y = p.quadratures() > 1 ? p.amps(1, k) : 0.0;
    out << k * tau << ',' << tau << ',' << p.amps(0, k) << ',' << y << '\n';
  }
}

void write_pulse_csv(const std::string& path, const Pulse& p) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot open " + path + " for writing");
  }
  write_pulse_csv(out, p);
}

Pulse read_pulse_csv(std::istream& in, int quadratures) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("pulse CSV: empty input");
  }
  if (line.rfind("t_start_ns,duration_ns,amp_x_GHz,amp_y_GHz", 0) != 0) {
    throw ConfigError("pulse CSV: unexpected header '" + line + "'");
  }
  std::vector<std::array<double, 4>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    std::array<double, 4> row{};
    std::istringstream fields(line);
    std::string field;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!std::getline(fields, field, ',')) {
        throw ConfigError("pulse CSV line " + std::to_string(line_no) + ": expected 4 columns");
      }
      try {
        row[i] = std::stod(field);
      } catch (const std::exception&) {
        throw ConfigError("pulse CSV line " + std::to_string(line_no) + ": bad number '" + field +
                          "'");
      }
    }
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw ConfigError("pulse CSV: no pixels");
  }
  const double tau = rows.front()[1];
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (std::abs(rows[k][1] - tau) > 1e-9 * std::max(1.0, tau) ||
        std::abs(rows[k][0] - k * tau) > 1e-9 * std::max(1.0, k * tau)) {
      throw ConfigError("pulse CSV: pixels must be contiguous with uniform duration");
    }
  }
  const int n = static_cast<int>(rows.size());
  RealMatrix amps = RealMatrix::Zero(2, n);
  for (int k = 0; k < n; ++k) {
    amps(0, k) = rows[k][2];
    amps(1, k) = rows[k][3];
  }
  return with_quadratures(Pulse(tau * n, std::move(amps)), quadratures);
}

Pulse read_pulse_csv(const std::string& path, int quadratures) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open pulse file " + path);
  }
  return read_pulse_csv(in, quadratures);
}

}  // namespace pulseforge
