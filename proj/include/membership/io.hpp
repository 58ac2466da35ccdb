#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "membership/bounds.hpp"
#include "membership/certsolver.hpp"
#include "membership/hefer.hpp"
#include "membership/quad.hpp"

namespace membership {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kCertificateFormat = "membership-certificate/1";

/// Canonical polynomial form {"terms": [{"coeff": "p/q", "exps": [...]}]}
/// over an external variable list.
Json poly_to_json(const Poly& p);
/// `where` prefixes diagnostics, e.g. "generators[1]".
Poly poly_from_json(const Json& j, const std::vector<std::string>& vars, const std::string& where);

Json complex_poly_to_json(const ComplexPoly& p);
ComplexPoly complex_poly_from_json(const Json& j, const std::vector<std::string>& vars, const std::string& where);

/// Ideal systems list generators as polynomials and the target as one
/// polynomial; module systems list generator rows and a target column.
AffineSystem system_from_json(const Json& j);
Json system_to_json(const AffineSystem& sys);
AffineSystem load_system(const std::string& path);
Json load_json(const std::string& path);

/// Stable fingerprint of a system (FNV-1a of its canonical JSON).
std::string system_hash(const AffineSystem& sys);

Json profile_to_json(const SystemProfile& p);
Json bound_report_to_json(const BoundReport& r, const SystemProfile& p);

/// Self-contained certificate file: cofactors plus provenance (profile,
/// theorem, system hash, tool version).
Json certificate_to_json(const Certificate& c, const AffineSystem& sys);
Certificate certificate_from_json(const Json& j, const AffineSystem& sys);
Json infeasible_to_json(const Infeasible& inf);
Json verification_to_json(const VerificationReport& r);

Json hefer_to_json(const HeferTable& t);
Json integral_certificate_to_json(const IntegralCertificate& c, const AffineSystem& sys);

}  // namespace membership
