#include "nicheck/harness.hpp"

#include "nicheck/analysis.hpp"
#include "nicheck/error.hpp"
#include "nicheck/model_file.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>

namespace nicheck
{

namespace
{

// Modulo draws keep sequences identical across standard libraries.
struct draw
{
    std::mt19937_64 rng;
    explicit draw( std::uint64_t seed ) : rng{ seed } {}
    std::uint64_t operator()( std::uint64_t n ) { return n == 0 ? 0 : rng() % n; }
};

[[noreturn]] void prerequisite( const std::string& msg )
{
    throw error{ errc::prerequisite_violated, msg };
}

domain_set base_members( const system& sys, domain_set blocks, const system& base )
{
    domain_set out;
    for ( auto b : blocks.members() )
        out = out | members_in( sys, b, base );
    return out;
}

struct target_system
{
    system sys;
    policy pol;
    domain_id g;
};

target_system enter_cut( const system& base, const policy& pol, const cut& target, domain_set victim_members )
{
    if ( !is_cut( pol, target ) )
        prerequisite( "target is not a cut of the policy" );
    auto abs = to_abstraction( target, base.num_domains() );
    auto sys1 = abstract_system( base, abs );
    auto pol1 = abstract_policy( pol, abs );
    domain_id g;
    if ( victim_members.subset_of( target.high ) )
        g = 0;
    else if ( victim_members.subset_of( target.low ) )
        g = 1;
    else
        prerequisite( "victim is split by the target cut" );
    return { std::move( sys1 ), std::move( pol1 ), g };
}

domain_id single_member( const system& sys, domain_id block, const system& base )
{
    auto m = members_in( sys, block, base );
    if ( m.size() != 1 )
        prerequisite( "expected a single-domain victim" );
    return m.members().front();
}

vulnerability translate_edge( notion stronger, notion weaker, const system& base, const policy& pol,
                              const vulnerability& v )
{
    using enum notion;
    auto is = [ & ]( notion x, notion y ) { return stronger == x && weaker == y; };
    if ( is( c_gn, l_gn ) || is( c_gn, h_gn ) || is( c_ndi, l_ndi ) || is( c_ndi, h_ndi ) )
        return v;
    if ( is( h_gn, l_gn ) || is( h_gn, c_gn ) )
    {
        const auto& g = std::get< gn_vulnerability >( v.detail );
        auto target = high_up_cut( pol, base.domain_of( g.a ) );
        if ( !target )
            prerequisite( "high-up cut of the acting domain is degenerate" );
        return translate_gn_vulnerability( base, pol, v, *target );
    }
    if ( is( l_gn, gn_pw ) )
    {
        const auto& g = std::get< gn_vulnerability >( v.detail );
        auto target = low_down_cut( pol, single_member( v.sys, g.victim, base ) );
        if ( !target )
            prerequisite( "low-down cut of the victim is degenerate" );
        return translate_gn_vulnerability( base, pol, v, *target );
    }
    if ( is( gn_pw, ndi_sw ) || is( c_gn, c_ndi ) || is( h_gn, h_ndi ) || is( l_gn, l_ndi ) )
        return gn_from_ndi_vulnerability( v );
    if ( is( ndi_sw, ndi_pw ) )
        return widen_ndi_vulnerability( v );
    if ( is( l_ndi, ndi_sw ) )
    {
        const auto& d = std::get< ndi_vulnerability >( v.detail );
        auto target = low_down_cut( pol, single_member( v.sys, d.victim, base ) );
        if ( !target )
            prerequisite( "low-down cut of the victim is degenerate" );
        return translate_ndi_vulnerability( base, pol, v, *target );
    }
    if ( is( h_ndi, ndi_pw ) )
    {
        const auto& d = std::get< ndi_vulnerability >( v.detail );
        if ( d.attackers.size() != 1 )
            prerequisite( "expected a single attacker" );
        auto target = high_up_cut( pol, single_member( v.sys, d.attackers.members().front(), base ) );
        if ( !target )
            prerequisite( "high-up cut of the attacker is degenerate" );
        return translate_ndi_vulnerability( base, pol, v, *target );
    }
    prerequisite( "no translation from " + std::string{ display_name( weaker ) } + " to " +
                  std::string{ display_name( stronger ) } );
}

std::vector< notion > hasse_path( notion from, notion to )
{
    std::map< notion, notion > parent;
    std::deque< notion > queue{ from };
    parent.emplace( from, from );
    while ( !queue.empty() )
    {
        auto x = queue.front();
        queue.pop_front();
        if ( x == to )
            break;
        for ( auto [ a, b ] : lattice_edges() )
            if ( a == x && !parent.contains( b ) )
            {
                parent.emplace( b, x );
                queue.push_back( b );
            }
    }
    if ( !parent.contains( to ) )
        prerequisite( "no implication path" );
    std::vector< notion > path{ to };
    while ( path.back() != from )
        path.push_back( parent.at( path.back() ) );
    std::reverse( path.begin(), path.end() );
    return path;
}

} // namespace

system random_system( const gen_params& p )
{
    draw rnd{ p.seed };
    const std::size_t states = 1 + rnd( p.max_states );
    const std::size_t lo = std::max< std::size_t >( 2, p.min_domains );
    const std::size_t domains = lo + rnd( p.max_domains >= lo ? p.max_domains - lo + 1 : 1 );
    const bool deterministic = rnd( 100 ) < p.deterministic_percent;

    system_def def;
    def.name = "random-" + std::to_string( p.seed );
    for ( std::size_t d = 0; d < domains; ++d )
    {
        def.domains.push_back( "D" + std::to_string( d ) );
        auto count = 1 + rnd( p.max_actions_per_domain );
        for ( std::size_t j = 0; j < count; ++j )
            def.actions.emplace_back( std::string( 1, static_cast< char >( 'a' + d ) ) + std::to_string( j ),
                                      def.domains.back() );
    }
    for ( std::size_t s = 0; s < states; ++s )
        def.states.push_back( "s" + std::to_string( s ) );
    def.initial = def.states.front();
    for ( const auto& d : def.domains )
        for ( const auto& s : def.states )
            def.observations.push_back( { d, s, std::to_string( rnd( p.obs_alphabet_size ) ) } );
    for ( const auto& s : def.states )
        for ( const auto& [ a, owner ] : def.actions )
        {
            std::set< std::size_t > targets;
            auto count = deterministic ? 1 : rnd( p.branching + 1 );
            for ( std::size_t k = 0; k < count; ++k )
                targets.insert( rnd( states ) );
            for ( auto t : targets )
                def.transitions.push_back( { s, a, def.states[ t ] } );
        }
    return validate_system( def, self_loops::implicit );
}

policy random_policy( const gen_params& p, std::size_t num_domains )
{
    draw rnd{ p.seed * 0x9E3779B97F4A7C15ULL + 7 };
    std::vector< edge > edges;
    for ( domain_id u = 0; u < num_domains; ++u )
        for ( domain_id v = 0; v < num_domains; ++v )
            if ( u != v && rnd( 100 ) < p.edge_percent )
                edges.emplace_back( u, v );
    return closure( num_domains, edges );
}

vulnerability translate_gn_vulnerability( const system& base, const policy& pol, const vulnerability& v,
                                          const cut& target )
{
    const auto* g = std::get_if< gn_vulnerability >( &v.detail );
    if ( !g )
        prerequisite( "not a GN vulnerability" );
    auto t = enter_cut( base, pol, target, members_in( v.sys, g->victim, base ) );
    if ( t.pol.allows( t.sys.domain_of( g->a ), t.g ) )
        prerequisite( "the acting block may interfere with the victim block" );
    auto out = *g;
    out.victim = t.g;
    out.beta = compute_view( t.sys, t.g, g->witness );
    return { std::move( t.sys ), std::move( t.pol ), target, std::move( out ) };
}

vulnerability translate_ndi_vulnerability( const system& base, const policy& pol, const vulnerability& v,
                                           const cut& target )
{
    const auto* d = std::get_if< ndi_vulnerability >( &v.detail );
    if ( !d )
        prerequisite( "not an NDI vulnerability" );
    auto t = enter_cut( base, pol, target, members_in( v.sys, d->victim, base ) );
    for ( auto a : d->alpha )
        if ( t.pol.allows( t.sys.domain_of( a ), t.g ) )
            prerequisite( "an attacker action's block may interfere with the victim block" );
    auto attackers = t.pol.noninterferers( t.g );
    if ( !base_members( v.sys, d->attackers, base ).subset_of( base_members( t.sys, attackers, base ) ) )
        prerequisite( "attackers are not all noninterferers of the victim block" );
    auto r = run_with_view( v.sys, d->victim, d->beta );
    if ( !r )
        prerequisite( "view is not attainable" );
    ndi_vulnerability out{ t.g, attackers, d->alpha, compute_view( t.sys, t.g, *r ) };
    return { std::move( t.sys ), std::move( t.pol ), target, std::move( out ) };
}

vulnerability widen_ndi_vulnerability( const vulnerability& v )
{
    const auto* d = std::get_if< ndi_vulnerability >( &v.detail );
    if ( !d )
        prerequisite( "not an NDI vulnerability" );
    auto out = v;
    std::get< ndi_vulnerability >( out.detail ).attackers = v.pol.noninterferers( d->victim );
    return out;
}

vulnerability gn_from_ndi_vulnerability( const vulnerability& v )
{
    const auto* d = std::get_if< ndi_vulnerability >( &v.detail );
    if ( !d )
        prerequisite( "not an NDI vulnerability" );
    const auto& sys = v.sys;
    auto r = run_with_view( sys, d->victim, d->beta );
    if ( !r )
        prerequisite( "view is not attainable" );
    auto make = [ & ]( std::vector< action_id > a0, action_id a, std::vector< action_id > a1, gn_direction dir ) {
        return vulnerability{ v.sys, v.pol, v.where,
                              gn_vulnerability{ d->victim, std::move( a0 ), a, std::move( a1 ), d->beta, dir, *r } };
    };

    // Delete attacker actions, leftmost first.
    for ( ;; )
    {
        const auto& seq = r->actions;
        auto it = std::find_if( seq.begin(), seq.end(),
                                [ & ]( action_id a ) { return d->attackers.contains( sys.domain_of( a ) ); } );
        if ( it == seq.end() )
            break;
        std::vector< action_id > cand( seq.begin(), it );
        cand.insert( cand.end(), it + 1, seq.end() );
        auto next = exists_run_with_view( sys, cand, d->victim, d->beta );
        if ( !next.compatible )
            return make( { seq.begin(), it }, *it, { it + 1, seq.end() }, gn_direction::minus );
        r = std::move( next.witness );
    }
    // Append α.
    for ( auto a : d->alpha )
    {
        auto cand = r->actions;
        cand.push_back( a );
        auto next = exists_run_with_view( sys, cand, d->victim, d->beta );
        if ( !next.compatible )
            return make( r->actions, a, {}, gn_direction::plus );
        r = std::move( next.witness );
    }
    prerequisite( "the attacker sequence is compatible with the view" );
}

vulnerability translate_along( notion stronger, notion weaker, const system& base, const policy& pol,
                               const vulnerability& v )
{
    auto path = hasse_path( stronger, weaker );
    auto out = v;
    for ( std::size_t i = path.size() - 1; i > 0; --i )
        out = translate_edge( path[ i - 1 ], path[ i ], base, pol, out );
    return out;
}

void lattice_report::merge( const lattice_report& other )
{
    systems += other.systems;
    edges_checked += other.edges_checked;
    translations += other.translations;
    bound_artifacts += other.bound_artifacts;
    violations.insert( violations.end(), other.violations.begin(), other.violations.end() );
}

lattice_report lattice_consistency( const system& sys, const policy& pol, const check_options& opt,
                                    const std::string& label, const profiler& prof )
{
    lattice_report out;
    out.systems = 1;
    auto verdicts = prof ? prof( sys, pol, opt ) : profile( sys, pol, opt );
    std::map< notion, const verdict* > by;
    for ( const auto& v : verdicts )
        by[ v.which ] = &v;
    auto violation = [ & ]( notion x, notion y, std::string why ) {
        out.violations.push_back( { label, x, y, std::move( why ), serialize_model( sys, pol ) } );
    };

    for ( const auto& v : verdicts )
        for ( const auto& f : v.findings )
            if ( auto why = revalidate( f ) )
                violation( v.which, v.which, "finding does not revalidate: " + *why );

    if ( by.contains( notion::h_gn ) && by.contains( notion::c_gn ) &&
         by[ notion::h_gn ]->secure() != by[ notion::c_gn ]->secure() )
        violation( notion::h_gn, notion::c_gn, "H-GN and C-GN verdicts differ" );

    for ( auto [ x, y ] : lattice_closure() )
    {
        if ( !by.contains( x ) || !by.contains( y ) )
            continue;
        ++out.edges_checked;
        const auto& weak = *by[ y ];
        if ( weak.secure() )
            continue;
        try
        {
            auto t = translate_along( x, y, sys, pol, weak.findings.front() );
            ++out.translations;
            if ( auto why = revalidate( t ) )
                violation( x, y, "translated witness does not revalidate: " + *why );
            else if ( by[ x ]->secure() )
            {
                if ( within_bounds( t, opt.limits ) )
                    violation( x, y, "stronger notion reported secure although a witness lies within the bounds" );
                else
                    ++out.bound_artifacts;
            }
        }
        catch ( const std::exception& e )
        {
            violation( x, y, std::string{ "translation failed: " } + e.what() );
        }
    }
    return out;
}

lattice_report lattice_consistency_check( std::size_t trials, const gen_params& params, const check_options& opt,
                                          const profiler& prof )
{
    lattice_report out;
    for ( std::size_t i = 0; i < trials; ++i )
    {
        auto p = params;
        p.seed = params.seed + i;
        auto sys = random_system( p );
        auto pol = random_policy( p, sys.num_domains() );
        out.merge( lattice_consistency( sys, pol, opt, "seed " + std::to_string( p.seed ), prof ) );
    }
    return out;
}

std::vector< policy > policy_supersets( const policy& pol, std::size_t exhaustive_limit, std::size_t random_trials,
                                        std::uint64_t seed )
{
    const std::size_t n = pol.size();
    auto key = []( const policy& p ) {
        std::vector< std::uint64_t > k;
        for ( domain_id u = 0; u < p.size(); ++u )
            k.push_back( p.successors( u ).bits() );
        return k;
    };
    auto extend = [ & ]( const policy& p, std::span< const edge > extra ) {
        auto edges = p.edges();
        edges.insert( edges.end(), extra.begin(), extra.end() );
        return closure( n, edges );
    };

    std::vector< policy > out;
    std::set< std::vector< std::uint64_t > > seen{ key( pol ) };
    if ( n <= exhaustive_limit )
    {
        std::deque< policy > queue{ pol };
        while ( !queue.empty() )
        {
            auto p = queue.front();
            queue.pop_front();
            for ( domain_id u = 0; u < n; ++u )
                for ( domain_id v = 0; v < n; ++v )
                {
                    if ( p.allows( u, v ) )
                        continue;
                    edge e{ u, v };
                    auto q = extend( p, std::span< const edge >{ &e, 1 } );
                    if ( seen.insert( key( q ) ).second )
                    {
                        out.push_back( q );
                        queue.push_back( q );
                    }
                }
        }
        return out;
    }
    draw rnd{ seed };
    for ( std::size_t t = 0; t < random_trials; ++t )
    {
        std::vector< edge > extra;
        for ( domain_id u = 0; u < n; ++u )
            for ( domain_id v = 0; v < n; ++v )
                if ( !pol.allows( u, v ) && rnd( 4 ) == 0 )
                    extra.emplace_back( u, v );
        auto q = extend( pol, extra );
        if ( seen.insert( key( q ) ).second )
            out.push_back( q );
    }
    return out;
}

monotonicity_report monotonicity_check( const system& sys, const policy& pol, notion n, const check_options& opt )
{
    constexpr std::size_t exhaustive_limit = 5;
    monotonicity_report out{ n, check( n, sys, pol, opt ), 0, pol.size() <= exhaustive_limit, {} };
    auto larger = policy_supersets( pol, exhaustive_limit );
    out.supersets = larger.size();
    if ( !out.base.secure() )
        return out;
    for ( auto& p : larger )
    {
        auto v = check( n, sys, p, opt );
        if ( v.secure() )
            continue;
        std::vector< edge > added;
        for ( auto e : p.edges() )
            if ( !pol.allows( e.first, e.second ) )
                added.push_back( e );
        out.flips.push_back( { std::move( p ), std::move( added ), std::move( v ) } );
    }
    return out;
}

} // namespace nicheck
