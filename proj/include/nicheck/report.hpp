#pragma once

#include "nicheck/harness.hpp"
#include "nicheck/notions.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace nicheck
{

inline constexpr int report_format_version = 1;

nlohmann::json bounds_to_json( const bounds& b );
nlohmann::json vulnerability_to_json( const vulnerability& v );
nlohmann::json verdict_to_json( const verdict& v );

// Self-contained report: the model text travels along with the verdicts.
nlohmann::json make_report( const system& sys, const policy& pol, const std::vector< verdict >& verdicts );

// Rebuilds a vulnerability from its JSON and the base model it refers to.
vulnerability vulnerability_from_json( const nlohmann::json& j, const system& base, const policy& pol );

struct verification
{
    std::size_t checked = 0;
    std::vector< std::string > failures;

    [[nodiscard]] bool ok() const { return failures.empty(); }
};

// Re-validates every vulnerability in a report using nothing but the report.
verification verify_report( const nlohmann::json& report );

std::string render_vulnerability( const vulnerability& v, const system& base );
std::string render_verdict( const verdict& v, const system& base );

nlohmann::json monotonicity_to_json( const monotonicity_report& r, const system& sys );
nlohmann::json lattice_to_json( const lattice_report& r );

} // namespace nicheck
