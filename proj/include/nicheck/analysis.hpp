#pragma once

#include "nicheck/model.hpp"

#include <optional>
#include <span>

namespace nicheck
{

struct compatibility
{
    bool compatible = false;
    std::optional< run > witness; // shortest, then lexicographically least
};

// Is there a run r with act_X(r) = alpha and view_viewer(r) = beta? Decided exactly by
// reachability over (state, alpha position, beta position).
compatibility is_compatible( const system& sys, domain_set x, std::span< const action_id > alpha, domain_id viewer,
                             const view& beta );

// Same decision without witness extraction.
bool compatible( const system& sys, domain_set x, std::span< const action_id > alpha, domain_id viewer,
                 const view& beta );

// Is there a run on exactly `seq` whose viewer view is beta?
compatibility exists_run_with_view( const system& sys, std::span< const action_id > seq, domain_id viewer,
                                    const view& beta );

// Some run with view beta, if any (X = ∅).
std::optional< run > run_with_view( const system& sys, domain_id viewer, const view& beta );

} // namespace nicheck
