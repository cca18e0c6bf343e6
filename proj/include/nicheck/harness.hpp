#pragma once

#include "nicheck/model.hpp"
#include "nicheck/notions.hpp"
#include "nicheck/policy.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nicheck
{

struct gen_params
{
    std::uint64_t seed = 1;
    std::size_t max_states = 4;
    std::size_t min_domains = 2;
    std::size_t max_domains = 3;
    std::size_t max_actions_per_domain = 1;
    std::size_t obs_alphabet_size = 2;
    std::size_t branching = 2;
    unsigned deterministic_percent = 30;
    unsigned edge_percent = 30;
};

// Input-enabled, reproducible from the parameters alone.
system random_system( const gen_params& p );
policy random_policy( const gen_params& p, std::size_t num_domains );

// Moves a GN vulnerability to the block of `target` containing its victim.
vulnerability translate_gn_vulnerability( const system& base, const policy& pol, const vulnerability& v,
                                          const cut& target );

// Moves an NDI vulnerability to `target`. Besides F ⊆ G, the attackers of `v` must lie among the noninterferers of G.
vulnerability translate_ndi_vulnerability( const system& base, const policy& pol, const vulnerability& v,
                                           const cut& target );

// Same system: replaces the attackers by every noninterferer of the victim.
vulnerability widen_ndi_vulnerability( const vulnerability& v );

// Same system: turns an NDI vulnerability into a GN one by editing a run with view β towards α
// one action at a time (deletions of attacker actions first, then appending α).
vulnerability gn_from_ndi_vulnerability( const vulnerability& v );

// Translates a vulnerability of `weaker` into one of `stronger` along lattice edges.
vulnerability translate_along( notion stronger, notion weaker, const system& base, const policy& pol,
                               const vulnerability& v );

using profiler = std::function< std::vector< verdict >( const system&, const policy&, const check_options& ) >;

struct lattice_violation
{
    std::string label;
    notion stronger;
    notion weaker;
    std::string reason;
    std::string model_text;
};

struct lattice_report
{
    std::size_t systems = 0;
    std::size_t edges_checked = 0;
    std::size_t translations = 0;
    std::size_t bound_artifacts = 0; // stronger secure at the bounds, translated witness outside them
    std::vector< lattice_violation > violations;

    void merge( const lattice_report& other );
};

lattice_report lattice_consistency( const system& sys, const policy& pol, const check_options& opt,
                                    const std::string& label, const profiler& prof = {} );
lattice_report lattice_consistency_check( std::size_t trials, const gen_params& params, const check_options& opt,
                                          const profiler& prof = {} );

struct policy_flip
{
    policy larger;
    std::vector< edge > added;
    verdict result;
};

struct monotonicity_report
{
    notion which;
    verdict base;
    std::size_t supersets = 0;
    bool exhaustive = true;
    std::vector< policy_flip > flips; // secure under the given policy, insecure under a larger one
};

// Every reflexive transitive superset of `pol` (up to `exhaustive_limit` domains; random
// supersets from `seed` beyond that).
std::vector< policy > policy_supersets( const policy& pol, std::size_t exhaustive_limit = 5,
                                        std::size_t random_trials = 64, std::uint64_t seed = 1 );

monotonicity_report monotonicity_check( const system& sys, const policy& pol, notion n, const check_options& opt );

} // namespace nicheck
