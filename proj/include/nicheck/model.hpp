#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nicheck
{

using state_id = std::uint32_t;
using action_id = std::uint32_t;
using domain_id = std::uint32_t;
using obs_id = std::uint32_t;

inline constexpr std::size_t max_domains = 64;

// A set of domains of one system. Systems carry at most `max_domains` domains.
class domain_set
{
    std::uint64_t _bits = 0;

public:
    constexpr domain_set() = default;
    constexpr explicit domain_set( std::uint64_t bits ) : _bits{ bits } {}
    domain_set( std::initializer_list< domain_id > ids )
    {
        for ( auto id : ids )
            insert( id );
    }

    static constexpr domain_set all( std::size_t n )
    {
        return domain_set( n >= 64 ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << n ) - 1 );
    }

    [[nodiscard]] constexpr bool contains( domain_id d ) const { return ( _bits >> d ) & 1U; }
    constexpr void insert( domain_id d ) { _bits |= std::uint64_t{ 1 } << d; }
    constexpr void erase( domain_id d ) { _bits &= ~( std::uint64_t{ 1 } << d ); }
    [[nodiscard]] constexpr bool empty() const { return _bits == 0; }
    [[nodiscard]] constexpr std::size_t size() const { return static_cast< std::size_t >( std::popcount( _bits ) ); }
    [[nodiscard]] constexpr std::uint64_t bits() const { return _bits; }
    [[nodiscard]] constexpr bool subset_of( domain_set other ) const { return ( _bits & ~other._bits ) == 0; }

    [[nodiscard]] std::vector< domain_id > members() const
    {
        std::vector< domain_id > out;
        for ( std::uint64_t b = _bits; b != 0; b &= b - 1 )
            out.push_back( static_cast< domain_id >( std::countr_zero( b ) ) );
        return out;
    }

    friend constexpr domain_set operator|( domain_set a, domain_set b ) { return domain_set( a._bits | b._bits ); }
    friend constexpr domain_set operator&( domain_set a, domain_set b ) { return domain_set( a._bits & b._bits ); }
    friend constexpr domain_set operator-( domain_set a, domain_set b ) { return domain_set( a._bits & ~b._bits ); }
    friend constexpr auto operator<=>( domain_set, domain_set ) = default;
};

enum class item_kind : std::uint8_t
{
    observation,
    action
};

struct view_item
{
    item_kind kind = item_kind::observation;
    std::uint32_t id = 0;

    static constexpr view_item obs( obs_id o ) { return { item_kind::observation, o }; }
    static constexpr view_item act( action_id a ) { return { item_kind::action, a }; }

    [[nodiscard]] constexpr bool is_obs() const { return kind == item_kind::observation; }
    [[nodiscard]] constexpr bool is_action() const { return kind == item_kind::action; }

    friend constexpr auto operator<=>( const view_item&, const view_item& ) = default;
};

// Alternation o (a o | o)* of observations and the viewer's own actions.
using view = std::vector< view_item >;

struct view_hash
{
    std::size_t operator()( const view& v ) const noexcept;
};

// Canonical order on views: shorter first, then lexicographic.
bool view_less( const view& lhs, const view& rhs );

struct run
{
    std::vector< state_id > states;   // s0 .. sn
    std::vector< action_id > actions; // a1 .. an

    [[nodiscard]] std::size_t length() const { return actions.size(); }

    friend auto operator<=>( const run&, const run& ) = default;
};

// A system as written down: names only, possibly incomplete or inconsistent.
struct system_def
{
    struct observation
    {
        std::string domain;
        std::string state;
        std::string value;
    };
    struct transition
    {
        std::string from;
        std::string action;
        std::string to;
    };

    std::string name;
    std::vector< std::string > domains;
    std::vector< std::pair< std::string, std::string > > actions; // (action, owning domain)
    std::vector< std::string > states;
    std::string initial;
    std::vector< observation > observations;
    std::vector< transition > transitions;
};

enum class self_loops
{
    explicit_only, // reject systems that are not input-enabled
    implicit       // add (s, a, s) for every (s, a) without a successor
};

// A validated, canonicalized, input-enabled system. Identifiers are dense indices in
// lexicographic order of their names (abstracted systems keep block order instead).
class system
{
public:
    struct parts
    {
        std::string name;
        std::vector< std::string > state_names;
        std::vector< std::string > action_names;
        std::vector< std::string > domain_names;
        std::vector< std::string > obs_names;
        state_id initial = 0;
        std::vector< domain_id > action_domain;
        std::vector< std::vector< obs_id > > obs;                     // [domain][state]
        std::vector< std::vector< std::vector< state_id > > > succ;   // [state][action], sorted
        std::vector< std::vector< std::string > > members;            // [domain] base domain names
        std::vector< std::vector< std::string > > obs_parts;          // [obs] component values
    };

private:
    parts _p;
    std::vector< std::vector< action_id > > _actions_of; // [domain]
    bool _deterministic = true;

public:
    explicit system( parts p );

    [[nodiscard]] const std::string& name() const { return _p.name; }
    [[nodiscard]] std::size_t num_states() const { return _p.state_names.size(); }
    [[nodiscard]] std::size_t num_actions() const { return _p.action_names.size(); }
    [[nodiscard]] std::size_t num_domains() const { return _p.domain_names.size(); }
    [[nodiscard]] std::size_t num_observations() const { return _p.obs_names.size(); }
    [[nodiscard]] state_id initial() const { return _p.initial; }

    [[nodiscard]] const std::string& state_name( state_id s ) const { return _p.state_names[ s ]; }
    [[nodiscard]] const std::string& action_name( action_id a ) const { return _p.action_names[ a ]; }
    [[nodiscard]] const std::string& domain_name( domain_id d ) const { return _p.domain_names[ d ]; }
    [[nodiscard]] const std::string& obs_name( obs_id o ) const { return _p.obs_names[ o ]; }

    [[nodiscard]] std::optional< state_id > find_state( std::string_view name ) const;
    [[nodiscard]] std::optional< action_id > find_action( std::string_view name ) const;
    [[nodiscard]] std::optional< domain_id > find_domain( std::string_view name ) const;
    [[nodiscard]] std::optional< obs_id > find_obs( std::string_view name ) const;

    [[nodiscard]] obs_id observe( domain_id d, state_id s ) const { return _p.obs[ d ][ s ]; }
    [[nodiscard]] domain_id domain_of( action_id a ) const { return _p.action_domain[ a ]; }
    [[nodiscard]] std::span< const state_id > successors( state_id s, action_id a ) const { return _p.succ[ s ][ a ]; }
    [[nodiscard]] std::span< const action_id > actions_of( domain_id d ) const { return _actions_of[ d ]; }
    [[nodiscard]] std::vector< action_id > actions_of( domain_set ds ) const;
    [[nodiscard]] domain_set all_domains() const { return domain_set::all( num_domains() ); }
    [[nodiscard]] bool deterministic() const { return _deterministic; }
    [[nodiscard]] bool has_transition( state_id from, action_id a, state_id to ) const;

    // Coalition metadata: base domains a domain stands for, and the per-member components
    // of an observation. Both are singletons for systems that are not abstracted.
    [[nodiscard]] std::span< const std::string > members( domain_id d ) const { return _p.members[ d ]; }
    [[nodiscard]] std::span< const std::string > obs_parts( obs_id o ) const { return _p.obs_parts[ o ]; }

    [[nodiscard]] const parts& raw() const { return _p; }
    [[nodiscard]] system_def to_def() const;
};

system validate_system( const system_def& def, self_loops loops );

// Absorptive concatenation: appends `beta` to `alpha`, dropping each leading element of the
// remainder that equals the current last element.
template < typename T >
std::vector< T > abs_concat( std::vector< T > alpha, std::span< const T > beta )
{
    for ( const auto& b : beta )
        if ( alpha.empty() || !( alpha.back() == b ) )
            alpha.push_back( b );
    return alpha;
}

template < typename T >
std::vector< T > abs_concat( std::vector< T > alpha, const std::vector< T >& beta )
{
    return abs_concat( std::move( alpha ), std::span< const T >{ beta } );
}

bool is_valid_run( const system& sys, const run& r );
view compute_view( const system& sys, domain_id viewer, const run& r );

// Extends `v` (the viewer's view of some run ending in a state) by one step into `target`.
void extend_view( const system& sys, domain_id viewer, view& v, action_id a, state_id target );

// Callbacks return false to stop the enumeration.
using run_visitor = std::function< bool( const run& ) >;

// Every initial run with at most `max_actions` actions, by length and then lexicographically
// on the (action, state) sequence.
void for_each_run( const system& sys, std::size_t max_actions, const run_visitor& visit );
std::vector< run > enumerate_runs( const system& sys, std::size_t max_actions );

// Every initial run whose action sequence is `seq`, lexicographically by state sequence.
void for_each_run_on_sequence( const system& sys, std::span< const action_id > seq, const run_visitor& visit );
std::vector< run > runs_on_sequence( const system& sys, std::span< const action_id > seq );

// Views of runs with at most `max_actions` actions, deduplicated, canonical order.
std::vector< view > enumerate_views( const system& sys, domain_id viewer, std::size_t max_actions );

// All views with at most `max_items` items (runs of any length), canonical order.
std::vector< view > views_up_to_length( const system& sys, domain_id viewer, std::size_t max_items );

bool is_well_formed_view( const system& sys, domain_id viewer, const view& v );

std::string render_view( const system& sys, const view& v );
std::string render_run( const system& sys, const run& r );
std::string render_actions( const system& sys, std::span< const action_id > seq );
view parse_view( const system& sys, std::string_view text );
run parse_run( const system& sys, std::string_view text );
std::vector< action_id > parse_actions( const system& sys, std::string_view text );

} // namespace nicheck
