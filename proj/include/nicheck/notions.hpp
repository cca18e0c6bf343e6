#pragma once

#include "nicheck/model.hpp"
#include "nicheck/policy.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace nicheck
{

enum class notion : std::uint8_t
{
    gn_pw,
    l_gn,
    h_gn,
    c_gn,
    ndi_pw,
    ndi_sw,
    l_ndi,
    h_ndi,
    c_ndi,
    p_sec
};

inline constexpr std::array< notion, 10 > all_notions = { notion::gn_pw,  notion::l_gn,   notion::h_gn,
                                                          notion::c_gn,   notion::ndi_pw, notion::ndi_sw,
                                                          notion::l_ndi,  notion::h_ndi,  notion::c_ndi,
                                                          notion::p_sec };

std::string_view display_name( notion n ); // "GN_pw", "L-GN", ...
std::string_view cli_name( notion n );     // "gn-pw", "l-gn", ...
std::optional< notion > parse_notion( std::string_view text );

bool is_gn( notion n );
bool is_ndi( notion n );
bool is_monotonic( notion n );

// Implication edges X -> Y (X-secure implies Y-secure) whose transitive closure is the lattice.
std::span< const std::pair< notion, notion > > lattice_edges();
std::vector< std::pair< notion, notion > > lattice_closure();

enum class base_notion
{
    gn,
    ndi
};

enum class cut_family
{
    all,
    high_up,
    low_down
};

struct bounds
{
    std::size_t depth = 4; // GN and P runs
    std::size_t alpha = 3; // NDI attacker sequences
    std::size_t view = 9;  // NDI victim views, in view items

    friend bool operator==( const bounds&, const bounds& ) = default;
};

enum class execution
{
    serial,
    parallel
};

struct check_options
{
    bounds limits;
    execution exec = execution::parallel;
};

enum class gn_direction
{
    plus, // insertion of a
    minus // deletion of a
};

struct gn_vulnerability
{
    domain_id victim = 0;
    std::vector< action_id > alpha0;
    action_id a = 0;
    std::vector< action_id > alpha1;
    view beta;
    gn_direction direction = gn_direction::plus;
    run witness; // act = alpha0 alpha1 (plus) or alpha0 a alpha1 (minus)

    // The sequence the victim cannot tell apart from the witness, yet no run matches.
    [[nodiscard]] std::vector< action_id > missing_sequence() const;
    [[nodiscard]] std::vector< action_id > witness_sequence() const;
};

struct ndi_vulnerability
{
    domain_id victim = 0;
    domain_set attackers;
    std::vector< action_id > alpha;
    view beta;
};

// Two sequences with equal purges whose final observations for the victim differ.
struct p_vulnerability
{
    domain_id victim = 0;
    std::vector< action_id > first;
    std::vector< action_id > second;
};

using vulnerability_detail = std::variant< gn_vulnerability, ndi_vulnerability, p_vulnerability >;

// A certified witness. `sys` and `pol` are what the witness refutes: the system itself, or
// its abstraction by `where`.
struct vulnerability
{
    system sys;
    policy pol;
    std::optional< cut > where;
    vulnerability_detail detail;
};

struct verdict
{
    notion which = notion::gn_pw;
    bounds limits;
    std::vector< vulnerability > findings; // empty: secure up to `limits`

    [[nodiscard]] bool secure() const { return findings.empty(); }
};

verdict check_gn_pair( const system& sys, const policy& pol, domain_id source, domain_id victim,
                       const check_options& opt = {} );
verdict check_gn_pw( const system& sys, const policy& pol, const check_options& opt = {} );
verdict check_ndi_pw( const system& sys, const policy& pol, const check_options& opt = {} );
verdict check_ndi_sw( const system& sys, const policy& pol, const check_options& opt = {} );

std::vector< cut > family_cuts( const policy& pol, cut_family family );
verdict check_cut_family( const system& sys, const policy& pol, base_notion base, cut_family family,
                          const check_options& opt = {} );

std::vector< action_id > purge( const system& sys, const policy& pol, domain_id u, std::span< const action_id > seq );
verdict check_p_secure( const system& sys, const policy& pol, const check_options& opt = {} );

verdict check( notion n, const system& sys, const policy& pol, const check_options& opt = {} );

// Every notion; P-security only for deterministic systems.
std::vector< verdict > profile( const system& sys, const policy& pol, const check_options& opt = {} );

// Re-decides a vulnerability from scratch. Returns the reason it fails, or nullopt if it holds.
std::optional< std::string > revalidate( const vulnerability& v );

// Whether `v` lies inside the search space the checker for `n` explores at `limits`.
bool within_bounds( const vulnerability& v, const bounds& limits );

} // namespace nicheck
