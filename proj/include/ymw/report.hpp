#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ymw/adhm.hpp"
#include "ymw/cylmodes.hpp"
#include "ymw/obstruction.hpp"
#include "ymw/quadrature.hpp"

namespace ymw {

const char* version();

// Basis and sign conventions that every report depends on.
nlohmann::json conventions();
// FNV-1a 64 of conventions().dump(), as 16 hex digits.
std::string conventions_fingerprint();

nlohmann::json to_json(const Point& x);
nlohmann::json to_json(const TwoFormD& f);
nlohmann::json to_json(const Eigen::Matrix3d& m);
nlohmann::json to_json(const AdhmValidation& v);
nlohmann::json to_json(const EnergyReport& e);
nlohmann::json to_json(const StokesReport& s);
nlohmann::json to_json(const ModeCoefficients& m);
nlohmann::json to_json(const ComparisonReport& c);
nlohmann::json to_json(const NeckFit& f);
nlohmann::json to_json(const PairingReport& p);
nlohmann::json to_json(const DeformStep& s);
nlohmann::json to_json(const CatalogReport& c);

// {"tool", "version", "command", "conventions_fingerprint", "input", "result", "pass"}.
nlohmann::json envelope(const std::string& command, const nlohmann::json& input, const nlohmann::json& result,
                        bool pass);

// dump(2) with a trailing newline.
std::string render(const nlohmann::json& j);

}  // namespace ymw
