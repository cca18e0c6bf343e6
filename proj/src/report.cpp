#include "nicheck/report.hpp"

#include "nicheck/error.hpp"
#include "nicheck/model_file.hpp"

#include <algorithm>
#include <sstream>

namespace nicheck
{

using nlohmann::json;

namespace
{

[[noreturn]] void malformed( const std::string& what )
{
    throw error{ errc::malformed_report, what };
}

json names_of( const system& sys, domain_set ds )
{
    json out = json::array();
    for ( auto d : ds.members() )
        out.push_back( sys.domain_name( d ) );
    return out;
}

json base_names( const system& sys, domain_set ds )
{
    json out = json::array();
    for ( auto d : ds.members() )
        for ( const auto& m : sys.members( d ) )
            out.push_back( m );
    return out;
}

json actions_json( const system& sys, std::span< const action_id > seq )
{
    json out = json::array();
    for ( auto a : seq )
        out.push_back( sys.action_name( a ) );
    return out;
}

json view_json( const system& sys, const view& v )
{
    json out = json::array();
    for ( const auto& item : v )
        out.push_back( item.is_obs() ? sys.obs_name( item.id ) : sys.action_name( item.id ) );
    return out;
}

json run_json( const system& sys, const run& r )
{
    json states = json::array();
    for ( auto s : r.states )
        states.push_back( sys.state_name( s ) );
    return { { "states", states }, { "actions", actions_json( sys, r.actions ) } };
}

json policy_json( const system& sys, const policy& pol )
{
    json out = json::array();
    for ( auto [ from, to ] : pol.edges() )
        if ( from != to )
            out.push_back( { sys.domain_name( from ), sys.domain_name( to ) } );
    return out;
}

const json& field( const json& j, const char* key )
{
    if ( !j.is_object() || !j.contains( key ) )
        malformed( std::string{ "missing field '" } + key + "'" );
    return j.at( key );
}

std::string string_field( const json& j, const char* key )
{
    const auto& f = field( j, key );
    if ( !f.is_string() )
        malformed( std::string{ "field '" } + key + "' is not a string" );
    return f.get< std::string >();
}

const json& array_field( const json& j, const char* key )
{
    const auto& f = field( j, key );
    if ( !f.is_array() )
        malformed( std::string{ "field '" } + key + "' is not an array" );
    return f;
}

domain_id domain_from( const system& sys, const json& j )
{
    if ( !j.is_string() )
        malformed( "domain name is not a string" );
    auto d = sys.find_domain( j.get< std::string >() );
    if ( !d )
        malformed( "unknown domain '" + j.get< std::string >() + "'" );
    return *d;
}

std::vector< action_id > actions_from( const system& sys, const json& j )
{
    if ( !j.is_array() )
        malformed( "action sequence is not an array" );
    std::vector< action_id > out;
    for ( const auto& tok : j )
    {
        auto a = tok.is_string() ? sys.find_action( tok.get< std::string >() ) : std::nullopt;
        if ( !a )
            malformed( "unknown action " + tok.dump() );
        out.push_back( *a );
    }
    return out;
}

view view_from( const system& sys, const json& j )
{
    if ( !j.is_array() )
        malformed( "view is not an array" );
    view out;
    for ( const auto& tok : j )
    {
        if ( !tok.is_string() )
            malformed( "view item is not a string" );
        auto name = tok.get< std::string >();
        if ( auto o = sys.find_obs( name ) )
            out.push_back( view_item::obs( *o ) );
        else if ( auto a = sys.find_action( name ) )
            out.push_back( view_item::act( *a ) );
        else
            malformed( "unknown view item '" + name + "'" );
    }
    return out;
}

run run_from( const system& sys, const json& j )
{
    run r;
    for ( const auto& tok : array_field( j, "states" ) )
    {
        auto s = tok.is_string() ? sys.find_state( tok.get< std::string >() ) : std::nullopt;
        if ( !s )
            malformed( "unknown state " + tok.dump() );
        r.states.push_back( *s );
    }
    r.actions = actions_from( sys, array_field( j, "actions" ) );
    return r;
}

domain_set base_set( const system& base, const json& names )
{
    if ( !names.is_array() )
        malformed( "cut block is not an array" );
    domain_set out;
    for ( const auto& n : names )
        out.insert( domain_from( base, n ) );
    return out;
}

std::string seq_text( const system& sys, std::span< const action_id > seq )
{
    return render_actions( sys, seq );
}

} // namespace

json bounds_to_json( const bounds& b )
{
    return { { "depth", b.depth }, { "alpha", b.alpha }, { "view", b.view } };
}

json vulnerability_to_json( const vulnerability& v )
{
    const auto& sys = v.sys;
    json j;
    if ( v.where )
        j[ "cut" ] = { { "high", base_names( sys, domain_set{ 0 } ) }, { "low", base_names( sys, domain_set{ 1 } ) } };
    else
        j[ "cut" ] = nullptr;
    j[ "policy" ] = policy_json( sys, v.pol );
    std::visit(
        [ & ]( const auto& d ) {
            using T = std::decay_t< decltype( d ) >;
            j[ "victim" ] = sys.domain_name( d.victim );
            if constexpr ( std::is_same_v< T, gn_vulnerability > )
            {
                j[ "kind" ] = "GN";
                j[ "direction" ] = d.direction == gn_direction::plus ? "PLUS" : "MINUS";
                j[ "alpha0" ] = actions_json( sys, d.alpha0 );
                j[ "action" ] = sys.action_name( d.a );
                j[ "alpha1" ] = actions_json( sys, d.alpha1 );
                j[ "beta" ] = view_json( sys, d.beta );
                j[ "witness" ] = run_json( sys, d.witness );
            }
            else if constexpr ( std::is_same_v< T, ndi_vulnerability > )
            {
                j[ "kind" ] = "NDI";
                j[ "attackers" ] = names_of( sys, d.attackers );
                j[ "alpha" ] = actions_json( sys, d.alpha );
                j[ "beta" ] = view_json( sys, d.beta );
            }
            else
            {
                j[ "kind" ] = "P";
                j[ "first" ] = actions_json( sys, d.first );
                j[ "second" ] = actions_json( sys, d.second );
            }
        },
        v.detail );
    return j;
}

json verdict_to_json( const verdict& v )
{
    json findings = json::array();
    for ( const auto& f : v.findings )
        findings.push_back( vulnerability_to_json( f ) );
    return { { "notion", std::string{ display_name( v.which ) } },
             { "status", v.secure() ? "SECURE_UP_TO" : "INSECURE" },
             { "bounds", bounds_to_json( v.limits ) },
             { "vulnerabilities", findings } };
}

json make_report( const system& sys, const policy& pol, const std::vector< verdict >& verdicts )
{
    json out = json::array();
    for ( const auto& v : verdicts )
        out.push_back( verdict_to_json( v ) );
    json j = { { "format_version", report_format_version },
               { "system", sys.name() },
               { "model", serialize_model( sys, pol ) },
               { "verdicts", out } };
    if ( !verdicts.empty() )
        j[ "bounds" ] = bounds_to_json( verdicts.front().limits );
    return j;
}

vulnerability vulnerability_from_json( const json& j, const system& base, const policy& pol )
{
    std::optional< cut > where;
    const auto& cut_j = field( j, "cut" );
    if ( !cut_j.is_null() )
    {
        cut c{ base_set( base, field( cut_j, "high" ) ), base_set( base, field( cut_j, "low" ) ) };
        if ( !is_cut( pol, c ) )
            malformed( "recorded cut is not a cut of the policy" );
        where = c;
    }
    system sys = where ? abstract_system( base, to_abstraction( *where, base.num_domains() ) ) : base;
    policy p = where ? abstract_policy( pol, to_abstraction( *where, base.num_domains() ) ) : pol;

    std::vector< std::pair< std::string, std::string > > recorded, actual;
    for ( const auto& e : array_field( j, "policy" ) )
    {
        if ( !e.is_array() || e.size() != 2 || !e[ 0 ].is_string() || !e[ 1 ].is_string() )
            malformed( "policy edge is not a pair of names" );
        recorded.emplace_back( e[ 0 ].get< std::string >(), e[ 1 ].get< std::string >() );
    }
    for ( const auto& e : policy_json( sys, p ) )
        actual.emplace_back( e[ 0 ].get< std::string >(), e[ 1 ].get< std::string >() );
    std::sort( recorded.begin(), recorded.end() );
    std::sort( actual.begin(), actual.end() );
    if ( recorded != actual )
        malformed( "recorded policy differs from the policy of the model" );

    domain_id victim = domain_from( sys, field( j, "victim" ) );
    auto kind = string_field( j, "kind" );
    vulnerability_detail detail;
    if ( kind == "GN" )
    {
        gn_vulnerability g;
        g.victim = victim;
        auto dir = string_field( j, "direction" );
        if ( dir != "PLUS" && dir != "MINUS" )
            malformed( "unknown direction '" + dir + "'" );
        g.direction = dir == "PLUS" ? gn_direction::plus : gn_direction::minus;
        g.alpha0 = actions_from( sys, field( j, "alpha0" ) );
        auto a = sys.find_action( string_field( j, "action" ) );
        if ( !a )
            malformed( "unknown action '" + string_field( j, "action" ) + "'" );
        g.a = *a;
        g.alpha1 = actions_from( sys, field( j, "alpha1" ) );
        g.beta = view_from( sys, field( j, "beta" ) );
        g.witness = run_from( sys, field( j, "witness" ) );
        detail = std::move( g );
    }
    else if ( kind == "NDI" )
    {
        ndi_vulnerability n;
        n.victim = victim;
        for ( const auto& name : array_field( j, "attackers" ) )
            n.attackers.insert( domain_from( sys, name ) );
        n.alpha = actions_from( sys, field( j, "alpha" ) );
        n.beta = view_from( sys, field( j, "beta" ) );
        detail = std::move( n );
    }
    else if ( kind == "P" )
    {
        p_vulnerability pv;
        pv.victim = victim;
        pv.first = actions_from( sys, field( j, "first" ) );
        pv.second = actions_from( sys, field( j, "second" ) );
        detail = std::move( pv );
    }
    else
        malformed( "unknown vulnerability kind '" + kind + "'" );

    return vulnerability{ std::move( sys ), std::move( p ), where, std::move( detail ) };
}

verification verify_report( const json& report )
{
    verification out;
    if ( !report.is_object() || !report.contains( "format_version" ) || report[ "format_version" ] != report_format_version )
        malformed( "unsupported or missing format_version" );
    auto m = parse_model( string_field( report, "model" ) );
    for ( const auto& v : array_field( report, "verdicts" ) )
    {
        auto name = string_field( v, "notion" );
        std::size_t index = 0;
        for ( const auto& f : array_field( v, "vulnerabilities" ) )
        {
            ++out.checked;
            std::string where = name + " #" + std::to_string( index++ );
            try
            {
                auto vuln = vulnerability_from_json( f, m.sys, m.pol );
                if ( auto reason = revalidate( vuln ) )
                    out.failures.push_back( where + ": " + *reason );
            }
            catch ( const error& e )
            {
                out.failures.push_back( where + ": " + e.what() );
            }
        }
        if ( string_field( v, "status" ) == "INSECURE" && array_field( v, "vulnerabilities" ).empty() )
            out.failures.push_back( name + ": INSECURE without a vulnerability" );
    }
    return out;
}

std::string render_vulnerability( const vulnerability& v, const system& base )
{
    const auto& sys = v.sys;
    std::ostringstream os;
    if ( v.where )
        os << "at cut " << render_cut( base, *v.where ) << ": ";
    std::visit(
        [ & ]( const auto& d ) {
            using T = std::decay_t< decltype( d ) >;
            if constexpr ( std::is_same_v< T, gn_vulnerability > )
            {
                os << "GN" << ( d.direction == gn_direction::plus ? "+" : "-" ) << " (" << sys.domain_name( d.victim )
                   << ", " << seq_text( sys, d.alpha0 ) << ", " << sys.action_name( d.a ) << ", "
                   << seq_text( sys, d.alpha1 ) << ", " << render_view( sys, d.beta ) << ")\n"
                   << "    witness run: " << render_run( sys, d.witness ) << "\n"
                   << "    no run on " << seq_text( sys, d.missing_sequence() ) << " has this view";
            }
            else if constexpr ( std::is_same_v< T, ndi_vulnerability > )
            {
                os << "NDI (" << sys.domain_name( d.victim ) << ", " << render_domain_set( sys, d.attackers ) << ", "
                   << seq_text( sys, d.alpha ) << ", " << render_view( sys, d.beta ) << ")\n"
                   << "    view " << render_view( sys, d.beta ) << " excludes attacker sequence "
                   << seq_text( sys, d.alpha );
            }
            else
            {
                os << "P (" << sys.domain_name( d.victim ) << ": " << seq_text( sys, d.first ) << " vs "
                   << seq_text( sys, d.second ) << ")\n"
                   << "    equal purges, different final observations";
            }
        },
        v.detail );
    return os.str();
}

std::string render_verdict( const verdict& v, const system& base )
{
    std::ostringstream os;
    os << display_name( v.which ) << ": ";
    if ( v.secure() )
        os << "SECURE_UP_TO(depth=" << v.limits.depth << ", alpha=" << v.limits.alpha << ", view=" << v.limits.view
           << ")";
    else
    {
        os << "INSECURE";
        for ( const auto& f : v.findings )
            os << "\n  " << render_vulnerability( f, base );
    }
    return os.str();
}

json monotonicity_to_json( const monotonicity_report& r, const system& sys )
{
    json flips = json::array();
    for ( const auto& f : r.flips )
    {
        json added = json::array();
        for ( auto [ from, to ] : f.added )
            added.push_back( { sys.domain_name( from ), sys.domain_name( to ) } );
        flips.push_back( { { "added", added }, { "policy", policy_json( sys, f.larger ) },
                           { "verdict", verdict_to_json( f.result ) } } );
    }
    return { { "notion", std::string{ display_name( r.which ) } },
             { "monotonic", is_monotonic( r.which ) },
             { "base", verdict_to_json( r.base ) },
             { "supersets", r.supersets },
             { "exhaustive", r.exhaustive },
             { "flips", flips } };
}

json lattice_to_json( const lattice_report& r )
{
    json violations = json::array();
    for ( const auto& v : r.violations )
        violations.push_back( { { "label", v.label },
                                { "stronger", std::string{ display_name( v.stronger ) } },
                                { "weaker", std::string{ display_name( v.weaker ) } },
                                { "reason", v.reason },
                                { "model", v.model_text } } );
    return { { "systems", r.systems },
             { "edges_checked", r.edges_checked },
             { "translations", r.translations },
             { "bound_artifacts", r.bound_artifacts },
             { "violations", violations } };
}

} // namespace nicheck
