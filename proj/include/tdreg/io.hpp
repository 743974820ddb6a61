#pragma once

/**
 * @file io.hpp
 * @brief Deterministic serialization: spectrum and time-series CSV, the
 *        design report (human text and machine JSON) and the verify report.
 *
 * Machine files carry 17 significant digits (round-trip exact); human
 * reports carry 6.
 */

#include <string>

#include "tdreg/simulator.hpp"
#include "tdreg/spectrum.hpp"
#include "tdreg/synthesis.hpp"

namespace tdreg {

enum class SpectrumKind { Zeros, Poles, Both };

/// %.17g / %.6g formatting.
std::string g17(double v);
std::string g6(double v);

/// Header: re,im,residual,kind,coincident. kind is "zero" or "pole";
/// coincident is 1 for roots matched by one of the opposite kind.
std::string spectrum_csv(const SensitivitySpectrum& spectrum, SpectrumKind kind);

/// Header: t,y,u,d,e.
std::string timeseries_csv(const TimeSeries& ts);

/// Header: omega,abs_S,arg_S.
std::string freqresp_csv(const Eigen::VectorXd& omegas, const Eigen::VectorXcd& values);

/// Human-readable design summary (6 significant digits).
std::string design_report_text(const DesignResult& result, double tol);

/// Machine-readable design result (17 significant digits).
std::string design_report_json(const DesignResult& result, double tol);

}  // namespace tdreg
