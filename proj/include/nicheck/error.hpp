#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nicheck
{

enum class errc
{
    // model
    missing_observation,
    not_input_enabled,
    undeclared_identifier,
    duplicate_identifier,
    fewer_than_two_domains,
    alphabet_clash,
    invalid_run,
    // policy
    not_reflexive,
    not_transitive,
    unknown_domain,
    block_mismatch,
    not_sub_block,
    malformed_view,
    // analysis
    view_initial_mismatch,
    foreign_action_in_alpha,
    // notions
    policy_edge_present,
    not_deterministic,
    // harness
    prerequisite_violated,
    // model files
    syntax_error,
    unreadable_file,
    malformed_report,
};

std::string_view to_string( errc code );

class error : public std::runtime_error
{
    errc _code;

public:
    error( errc code, const std::string& what ) : std::runtime_error{ what }, _code{ code } {}

    [[nodiscard]] errc code() const { return _code; }
};

} // namespace nicheck
