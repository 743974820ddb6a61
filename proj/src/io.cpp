#include "tdreg/io.hpp"

#include <cstdio>
#include <sstream>

namespace tdreg {

namespace {

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

void append_rootset(std::ostringstream& out, const RootSet& set, const char* kind,
                    const std::vector<Complex>& coincident) {
  for (const Root& r : set.roots) {
    bool match = false;
    for (const Complex& c : coincident) {
      if (std::abs(c - r.s) <= kCoincidenceTol) {
        match = true;
        break;
      }
    }
    out << g17(r.s.real()) << ',' << g17(r.s.imag()) << ',' << g17(r.residual) << ',' << kind
        << ',' << (match ? 1 : 0) << '\n';
  }
}

}  // namespace

std::string g17(double v) { return format("%.17g", v); }
std::string g6(double v) { return format("%.6g", v); }

std::string spectrum_csv(const SensitivitySpectrum& spectrum, SpectrumKind kind) {
  std::ostringstream out;
  out << "re,im,residual,kind,coincident\n";
  if (kind == SpectrumKind::Zeros || kind == SpectrumKind::Both)
    append_rootset(out, spectrum.zeros, "zero", spectrum.coincident);
  if (kind == SpectrumKind::Poles || kind == SpectrumKind::Both)
    append_rootset(out, spectrum.poles, "pole", spectrum.coincident);
  return out.str();
}

std::string timeseries_csv(const TimeSeries& ts) {
  std::ostringstream out;
  out << "t,y,u,d,e\n";
  for (Eigen::Index i = 0; i < ts.t.size(); ++i) {
    out << g17(ts.t[i]) << ',' << g17(ts.y[i]) << ',' << g17(ts.u[i]) << ',' << g17(ts.d[i])
        << ',' << g17(ts.e[i]) << '\n';
  }
  return out.str();
}

std::string freqresp_csv(const Eigen::VectorXd& omegas, const Eigen::VectorXcd& values) {
  std::ostringstream out;
  out << "omega,abs_S,arg_S\n";
  for (Eigen::Index i = 0; i < omegas.size(); ++i) {
    out << g17(omegas[i]) << ',' << g17(std::abs(values[i])) << ',' << g17(std::arg(values[i]))
        << '\n';
  }
  return out.str();
}

std::string design_report_text(const DesignResult& result, double tol) {
  std::ostringstream out;
  out << "gains:";
  for (Eigen::Index k = 0; k < result.qm.gains().size(); ++k)
    out << ' ' << g6(result.qm.gains()[k]);
  out << "\nspacing: " << g6(result.qm.spacing()) << "  span: " << g6(result.qm.span()) << '\n';
  out << "residual_inf: " << g6(result.residual_inf) << '\n';
  out << "rank: " << result.rank << (result.rank_deficient ? " (rank deficient)" : "") << '\n';
  out << "condition: " << g6(result.condition) << '\n';
  Eigen::Index row = 0;
  if (result.include_dc) {
    out << "|S(0)| = " << g6(result.sensitivity_at_harmonics[row]) << '\n';
    ++row;
  }
  for (Eigen::Index l = 0; l < result.omegas.size(); ++l, ++row) {
    out << "|S(j*" << g6(result.omegas[l])
        << ")| = " << g6(result.sensitivity_at_harmonics[row]) << '\n';
  }
  for (const std::string& w : result.warnings) out << "warning: " << w << '\n';
  out << "regulation: " << (result.pass(tol) ? "PASS" : "FAIL") << " (tol " << g6(tol) << ")\n";
  return out.str();
}

std::string design_report_json(const DesignResult& result, double tol) {
  std::ostringstream out;
  out << "{\n  \"gains\": [";
  for (Eigen::Index k = 0; k < result.qm.gains().size(); ++k)
    out << (k ? ", " : "") << g17(result.qm.gains()[k]);
  out << "],\n";
  out << "  \"spacing\": " << g17(result.qm.spacing()) << ",\n";
  out << "  \"residual_inf\": " << g17(result.residual_inf) << ",\n";
  out << "  \"rank\": " << result.rank << ",\n";
  out << "  \"rank_deficient\": " << (result.rank_deficient ? "true" : "false") << ",\n";
  out << "  \"condition\": " << g17(result.condition) << ",\n";
  out << "  \"include_dc\": " << (result.include_dc ? "true" : "false") << ",\n";
  out << "  \"omegas\": [";
  for (Eigen::Index l = 0; l < result.omegas.size(); ++l)
    out << (l ? ", " : "") << g17(result.omegas[l]);
  out << "],\n  \"sensitivity_at_harmonics\": [";
  for (Eigen::Index l = 0; l < result.sensitivity_at_harmonics.size(); ++l)
    out << (l ? ", " : "") << g17(result.sensitivity_at_harmonics[l]);
  out << "],\n  \"pass\": " << (result.pass(tol) ? "true" : "false") << "\n}\n";
  return out.str();
}

}  // namespace tdreg
