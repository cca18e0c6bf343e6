#include "nicheck/model.hpp"

#include "nicheck/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace nicheck
{

std::string_view to_string( errc code )
{
    switch ( code )
    {
    case errc::missing_observation: return "MissingObservation";
    case errc::not_input_enabled: return "NotInputEnabled";
    case errc::undeclared_identifier: return "UndeclaredIdentifier";
    case errc::duplicate_identifier: return "DuplicateIdentifier";
    case errc::fewer_than_two_domains: return "FewerThanTwoDomains";
    case errc::alphabet_clash: return "AlphabetClash";
    case errc::invalid_run: return "InvalidRun";
    case errc::not_reflexive: return "NotReflexive";
    case errc::not_transitive: return "NotTransitive";
    case errc::unknown_domain: return "UnknownDomain";
    case errc::block_mismatch: return "BlockMismatch";
    case errc::not_sub_block: return "NotSubBlock";
    case errc::malformed_view: return "MalformedView";
    case errc::view_initial_mismatch: return "ViewInitialMismatch";
    case errc::foreign_action_in_alpha: return "ForeignActionInAlpha";
    case errc::policy_edge_present: return "PolicyEdgePresent";
    case errc::not_deterministic: return "NotDeterministic";
    case errc::prerequisite_violated: return "PrerequisiteViolated";
    case errc::syntax_error: return "SyntaxError";
    case errc::unreadable_file: return "UnreadableFile";
    case errc::malformed_report: return "MalformedReport";
    }
    return "Unknown";
}

std::size_t view_hash::operator()( const view& v ) const noexcept
{
    std::size_t h = 0xcbf29ce484222325ULL;
    for ( const auto& item : v )
    {
        h ^= ( static_cast< std::size_t >( item.id ) << 1 ) | static_cast< std::size_t >( item.kind );
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool view_less( const view& lhs, const view& rhs )
{
    if ( lhs.size() != rhs.size() )
        return lhs.size() < rhs.size();
    return lhs < rhs;
}

namespace
{

std::optional< std::uint32_t > find_name( const std::vector< std::string >& names, std::string_view name )
{
    auto it = std::lower_bound( names.begin(), names.end(), name );
    if ( it == names.end() || *it != name )
        return std::nullopt;
    return static_cast< std::uint32_t >( it - names.begin() );
}

std::optional< std::uint32_t > find_name_linear( const std::vector< std::string >& names, std::string_view name )
{
    auto it = std::find( names.begin(), names.end(), name );
    if ( it == names.end() )
        return std::nullopt;
    return static_cast< std::uint32_t >( it - names.begin() );
}

std::vector< std::string > sorted_unique( std::vector< std::string > names, std::string_view what )
{
    std::sort( names.begin(), names.end() );
    auto dup = std::adjacent_find( names.begin(), names.end() );
    if ( dup != names.end() )
        throw error{ errc::duplicate_identifier, "duplicate " + std::string{ what } + " '" + *dup + "'" };
    return names;
}

[[noreturn]] void undeclared( std::string_view what, const std::string& name )
{
    throw error{ errc::undeclared_identifier, "undeclared " + std::string{ what } + " '" + name + "'" };
}

} // namespace

system::system( parts p ) : _p{ std::move( p ) }
{
    _actions_of.resize( _p.domain_names.size() );
    for ( action_id a = 0; a < _p.action_names.size(); ++a )
        _actions_of[ _p.action_domain[ a ] ].push_back( a );
    for ( const auto& per_state : _p.succ )
        for ( const auto& targets : per_state )
            if ( targets.size() > 1 )
                _deterministic = false;
}

std::optional< state_id > system::find_state( std::string_view name ) const
{
    return find_name_linear( _p.state_names, name );
}

std::optional< action_id > system::find_action( std::string_view name ) const
{
    return find_name_linear( _p.action_names, name );
}

std::optional< domain_id > system::find_domain( std::string_view name ) const
{
    return find_name_linear( _p.domain_names, name );
}

std::optional< obs_id > system::find_obs( std::string_view name ) const
{
    return find_name_linear( _p.obs_names, name );
}

std::vector< action_id > system::actions_of( domain_set ds ) const
{
    std::vector< action_id > out;
    for ( action_id a = 0; a < num_actions(); ++a )
        if ( ds.contains( domain_of( a ) ) )
            out.push_back( a );
    return out;
}

bool system::has_transition( state_id from, action_id a, state_id to ) const
{
    const auto& targets = _p.succ[ from ][ a ];
    return std::binary_search( targets.begin(), targets.end(), to );
}

system_def system::to_def() const
{
    system_def def;
    def.name = _p.name;
    def.domains = _p.domain_names;
    for ( action_id a = 0; a < num_actions(); ++a )
        def.actions.emplace_back( action_name( a ), domain_name( domain_of( a ) ) );
    def.states = _p.state_names;
    def.initial = state_name( initial() );
    for ( domain_id d = 0; d < num_domains(); ++d )
        for ( state_id s = 0; s < num_states(); ++s )
            def.observations.push_back( { domain_name( d ), state_name( s ), obs_name( observe( d, s ) ) } );
    for ( state_id s = 0; s < num_states(); ++s )
        for ( action_id a = 0; a < num_actions(); ++a )
            for ( auto t : successors( s, a ) )
                def.transitions.push_back( { state_name( s ), action_name( a ), state_name( t ) } );
    return def;
}

system validate_system( const system_def& def, self_loops loops )
{
    system::parts p;
    p.name = def.name;
    p.domain_names = sorted_unique( def.domains, "domain" );
    if ( p.domain_names.size() < 2 )
        throw error{ errc::fewer_than_two_domains, "a system needs at least two domains" };
    if ( p.domain_names.size() > max_domains )
        throw error{ errc::fewer_than_two_domains, "at most 64 domains are supported" };
    p.state_names = sorted_unique( def.states, "state" );

    std::vector< std::string > action_names;
    for ( const auto& [ action, dom ] : def.actions )
        action_names.push_back( action );
    p.action_names = sorted_unique( action_names, "action" );
    p.action_domain.resize( p.action_names.size() );
    for ( const auto& [ action, dom ] : def.actions )
    {
        auto d = find_name( p.domain_names, dom );
        if ( !d )
            undeclared( "domain", dom );
        p.action_domain[ *find_name( p.action_names, action ) ] = *d;
    }

    auto init = find_name( p.state_names, def.initial );
    if ( !init )
        undeclared( "initial state", def.initial );
    p.initial = *init;

    std::set< std::string > values;
    for ( const auto& o : def.observations )
        values.insert( o.value );
    p.obs_names.assign( values.begin(), values.end() );
    for ( const auto& v : p.obs_names )
        if ( find_name( p.action_names, v ) )
            throw error{ errc::alphabet_clash, "'" + v + "' is both an action and an observation" };

    constexpr obs_id unset = ~obs_id{ 0 };
    p.obs.assign( p.domain_names.size(), std::vector< obs_id >( p.state_names.size(), unset ) );
    for ( const auto& o : def.observations )
    {
        auto d = find_name( p.domain_names, o.domain );
        if ( !d )
            undeclared( "domain", o.domain );
        auto s = find_name( p.state_names, o.state );
        if ( !s )
            undeclared( "state", o.state );
        auto value = *find_name( p.obs_names, o.value );
        auto& slot = p.obs[ *d ][ *s ];
        if ( slot != unset && slot != value )
            throw error{ errc::duplicate_identifier,
                         "conflicting observations for domain '" + o.domain + "' at state '" + o.state + "'" };
        slot = value;
    }
    for ( domain_id d = 0; d < p.domain_names.size(); ++d )
        for ( state_id s = 0; s < p.state_names.size(); ++s )
            if ( p.obs[ d ][ s ] == unset )
                throw error{ errc::missing_observation, "no observation for domain '" + p.domain_names[ d ] +
                                                           "' at state '" + p.state_names[ s ] + "'" };

    p.succ.assign( p.state_names.size(), std::vector< std::vector< state_id > >( p.action_names.size() ) );
    for ( const auto& t : def.transitions )
    {
        auto from = find_name( p.state_names, t.from );
        if ( !from )
            undeclared( "state", t.from );
        auto to = find_name( p.state_names, t.to );
        if ( !to )
            undeclared( "state", t.to );
        auto a = find_name( p.action_names, t.action );
        if ( !a )
            undeclared( "action", t.action );
        p.succ[ *from ][ *a ].push_back( *to );
    }
    for ( state_id s = 0; s < p.state_names.size(); ++s )
        for ( action_id a = 0; a < p.action_names.size(); ++a )
        {
            auto& targets = p.succ[ s ][ a ];
            if ( targets.empty() )
            {
                if ( loops == self_loops::explicit_only )
                    throw error{ errc::not_input_enabled, "action '" + p.action_names[ a ] +
                                                              "' is not enabled in state '" + p.state_names[ s ] +
                                                              "'" };
                targets.push_back( s );
            }
            std::sort( targets.begin(), targets.end() );
            targets.erase( std::unique( targets.begin(), targets.end() ), targets.end() );
        }

    for ( const auto& d : p.domain_names )
        p.members.push_back( { d } );
    for ( const auto& o : p.obs_names )
        p.obs_parts.push_back( { o } );
    return system{ std::move( p ) };
}

bool is_valid_run( const system& sys, const run& r )
{
    if ( r.states.size() != r.actions.size() + 1 || r.states.front() != sys.initial() )
        return false;
    for ( std::size_t i = 0; i < r.actions.size(); ++i )
    {
        if ( r.states[ i ] >= sys.num_states() || r.states[ i + 1 ] >= sys.num_states() ||
             r.actions[ i ] >= sys.num_actions() )
            return false;
        if ( !sys.has_transition( r.states[ i ], r.actions[ i ], r.states[ i + 1 ] ) )
            return false;
    }
    return true;
}

void extend_view( const system& sys, domain_id viewer, view& v, action_id a, state_id target )
{
    auto o = view_item::obs( sys.observe( viewer, target ) );
    if ( sys.domain_of( a ) == viewer )
    {
        v.push_back( view_item::act( a ) );
        v.push_back( o );
    }
    else if ( v.empty() || v.back() != o )
    {
        v.push_back( o );
    }
}

view compute_view( const system& sys, domain_id viewer, const run& r )
{
    if ( r.states.empty() || !is_valid_run( sys, r ) )
        throw error{ errc::invalid_run, "not an initial run of system '" + sys.name() + "'" };
    view v{ view_item::obs( sys.observe( viewer, r.states.front() ) ) };
    for ( std::size_t i = 0; i < r.actions.size(); ++i )
        extend_view( sys, viewer, v, r.actions[ i ], r.states[ i + 1 ] );
    return v;
}

namespace
{

// Depth-first walk over runs of exactly `target` actions; returns false once the visitor stops.
bool runs_of_length( const system& sys, run& current, std::size_t target, const run_visitor& visit )
{
    if ( current.actions.size() == target )
        return visit( current );
    auto s = current.states.back();
    for ( action_id a = 0; a < sys.num_actions(); ++a )
        for ( auto t : sys.successors( s, a ) )
        {
            current.actions.push_back( a );
            current.states.push_back( t );
            bool go_on = runs_of_length( sys, current, target, visit );
            current.actions.pop_back();
            current.states.pop_back();
            if ( !go_on )
                return false;
        }
    return true;
}

bool runs_on( const system& sys, run& current, std::span< const action_id > seq, const run_visitor& visit )
{
    auto i = current.actions.size();
    if ( i == seq.size() )
        return visit( current );
    for ( auto t : sys.successors( current.states.back(), seq[ i ] ) )
    {
        current.actions.push_back( seq[ i ] );
        current.states.push_back( t );
        bool go_on = runs_on( sys, current, seq, visit );
        current.actions.pop_back();
        current.states.pop_back();
        if ( !go_on )
            return false;
    }
    return true;
}

struct state_view
{
    state_id state;
    view v;
    bool operator==( const state_view& ) const = default;
};

struct state_view_hash
{
    std::size_t operator()( const state_view& sv ) const noexcept
    {
        return view_hash{}( sv.v ) * 31 + sv.state;
    }
};

} // namespace

void for_each_run( const system& sys, std::size_t max_actions, const run_visitor& visit )
{
    for ( std::size_t len = 0; len <= max_actions; ++len )
    {
        run current{ { sys.initial() }, {} };
        if ( !runs_of_length( sys, current, len, visit ) )
            return;
    }
}

std::vector< run > enumerate_runs( const system& sys, std::size_t max_actions )
{
    std::vector< run > out;
    for_each_run( sys, max_actions, [ & ]( const run& r ) {
        out.push_back( r );
        return true;
    } );
    return out;
}

void for_each_run_on_sequence( const system& sys, std::span< const action_id > seq, const run_visitor& visit )
{
    run current{ { sys.initial() }, {} };
    runs_on( sys, current, seq, visit );
}

std::vector< run > runs_on_sequence( const system& sys, std::span< const action_id > seq )
{
    std::vector< run > out;
    for_each_run_on_sequence( sys, seq, [ & ]( const run& r ) {
        out.push_back( r );
        return true;
    } );
    return out;
}

std::vector< view > enumerate_views( const system& sys, domain_id viewer, std::size_t max_actions )
{
    std::unordered_set< state_view, state_view_hash > seen;
    std::set< view, decltype( &view_less ) > views{ &view_less };
    std::vector< state_view > frontier{ { sys.initial(), { view_item::obs( sys.observe( viewer, sys.initial() ) ) } } };
    seen.insert( frontier.front() );
    views.insert( frontier.front().v );
    for ( std::size_t depth = 0; depth < max_actions && !frontier.empty(); ++depth )
    {
        std::vector< state_view > next;
        for ( const auto& node : frontier )
            for ( action_id a = 0; a < sys.num_actions(); ++a )
                for ( auto t : sys.successors( node.state, a ) )
                {
                    state_view succ{ t, node.v };
                    extend_view( sys, viewer, succ.v, a, t );
                    if ( seen.insert( succ ).second )
                    {
                        views.insert( succ.v );
                        next.push_back( std::move( succ ) );
                    }
                }
        frontier = std::move( next );
    }
    return { views.begin(), views.end() };
}

std::vector< view > views_up_to_length( const system& sys, domain_id viewer, std::size_t max_items )
{
    std::set< view, decltype( &view_less ) > views{ &view_less };
    if ( max_items == 0 )
        return {};
    std::unordered_set< state_view, state_view_hash > seen;
    std::deque< state_view > queue{ { sys.initial(), { view_item::obs( sys.observe( viewer, sys.initial() ) ) } } };
    seen.insert( queue.front() );
    while ( !queue.empty() )
    {
        auto node = std::move( queue.front() );
        queue.pop_front();
        views.insert( node.v );
        for ( action_id a = 0; a < sys.num_actions(); ++a )
            for ( auto t : sys.successors( node.state, a ) )
            {
                state_view succ{ t, node.v };
                extend_view( sys, viewer, succ.v, a, t );
                if ( succ.v.size() <= max_items && seen.insert( succ ).second )
                    queue.push_back( std::move( succ ) );
            }
    }
    return { views.begin(), views.end() };
}

bool is_well_formed_view( const system& sys, domain_id viewer, const view& v )
{
    if ( v.empty() || !v.front().is_obs() || !v.back().is_obs() )
        return false;
    for ( std::size_t i = 0; i < v.size(); ++i )
    {
        const auto& item = v[ i ];
        if ( item.is_action() )
        {
            if ( item.id >= sys.num_actions() || sys.domain_of( item.id ) != viewer || !v[ i + 1 ].is_obs() )
                return false;
        }
        else
        {
            if ( item.id >= sys.num_observations() )
                return false;
            if ( i > 0 && v[ i - 1 ] == item )
                return false;
        }
    }
    return true;
}

namespace
{

std::vector< std::string > split_ws( std::string_view text )
{
    std::vector< std::string > out;
    std::istringstream in{ std::string{ text } };
    std::string token;
    while ( in >> token )
        out.push_back( token );
    return out;
}

} // namespace

std::string render_view( const system& sys, const view& v )
{
    std::string out;
    for ( const auto& item : v )
    {
        if ( !out.empty() )
            out += ' ';
        out += item.is_obs() ? sys.obs_name( item.id ) : sys.action_name( item.id );
    }
    return out;
}

std::string render_run( const system& sys, const run& r )
{
    std::string out = sys.state_name( r.states.front() );
    for ( std::size_t i = 0; i < r.actions.size(); ++i )
        out += ' ' + sys.action_name( r.actions[ i ] ) + ' ' + sys.state_name( r.states[ i + 1 ] );
    return out;
}

std::string render_actions( const system& sys, std::span< const action_id > seq )
{
    if ( seq.empty() )
        return "ε";
    std::string out;
    for ( auto a : seq )
    {
        if ( !out.empty() )
            out += ' ';
        out += sys.action_name( a );
    }
    return out;
}

view parse_view( const system& sys, std::string_view text )
{
    view v;
    for ( const auto& token : split_ws( text ) )
    {
        if ( auto a = sys.find_action( token ) )
            v.push_back( view_item::act( *a ) );
        else if ( auto o = sys.find_obs( token ) )
            v.push_back( view_item::obs( *o ) );
        else
            throw error{ errc::malformed_view, "'" + token + "' is neither an action nor an observation" };
    }
    return v;
}

run parse_run( const system& sys, std::string_view text )
{
    auto tokens = split_ws( text );
    if ( tokens.empty() || tokens.size() % 2 == 0 )
        throw error{ errc::invalid_run, "a run alternates states and actions, starting and ending with a state" };
    run r;
    for ( std::size_t i = 0; i < tokens.size(); ++i )
    {
        if ( i % 2 == 0 )
        {
            auto s = sys.find_state( tokens[ i ] );
            if ( !s )
                throw error{ errc::invalid_run, "unknown state '" + tokens[ i ] + "'" };
            r.states.push_back( *s );
        }
        else
        {
            auto a = sys.find_action( tokens[ i ] );
            if ( !a )
                throw error{ errc::invalid_run, "unknown action '" + tokens[ i ] + "'" };
            r.actions.push_back( *a );
        }
    }
    if ( !is_valid_run( sys, r ) )
        throw error{ errc::invalid_run, "'" + std::string{ text } + "' is not an initial run" };
    return r;
}

std::vector< action_id > parse_actions( const system& sys, std::string_view text )
{
    std::vector< action_id > seq;
    for ( const auto& token : split_ws( text ) )
    {
        if ( token == "ε" || token == "eps" )
            continue;
        auto a = sys.find_action( token );
        if ( !a )
            throw error{ errc::undeclared_identifier, "unknown action '" + token + "'" };
        seq.push_back( *a );
    }
    return seq;
}

} // namespace nicheck
