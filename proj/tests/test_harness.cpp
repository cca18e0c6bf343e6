#include "nicheck/analysis.hpp"
#include "nicheck/error.hpp"
#include "nicheck/harness.hpp"
#include "nicheck/model_file.hpp"
#include "nicheck/notions.hpp"

#include <doctest.h>

#include <sstream>

using namespace nicheck;

namespace
{

check_options at( std::size_t depth, std::size_t alpha = 3, std::size_t view = 7 )
{
    check_options o;
    o.limits = { depth, alpha, view };
    return o;
}

domain_set named( const nicheck::system& sys, std::initializer_list< const char* > names )
{
    domain_set out;
    for ( const auto* n : names )
        out.insert( *sys.find_domain( n ) );
    return out;
}

std::size_t transition_count( const nicheck::system& sys )
{
    std::size_t n = 0;
    for ( state_id s = 0; s < sys.num_states(); ++s )
        for ( action_id a = 0; a < sys.num_actions(); ++a )
            n += sys.successors( s, a ).size();
    return n;
}

} // namespace

TEST_CASE( "random generation is reproducible and valid" )
{
    for ( std::uint64_t seed = 1; seed <= 100; ++seed )
    {
        gen_params p;
        p.seed = seed;
        auto a = random_system( p );
        auto b = random_system( p );
        auto pol = random_policy( p, a.num_domains() );
        CHECK( serialize_model( a, pol ) == serialize_model( b, pol ) );
        CHECK( pol == random_policy( p, a.num_domains() ) );
        CHECK( pol.is_reflexive() );
        CHECK( pol.is_transitive() );
        CHECK( a.num_states() <= p.max_states );
        CHECK( a.num_domains() >= p.min_domains );
        CHECK( a.num_domains() <= p.max_domains );

        // Recount transitions from the serialized text.
        auto text = serialize_model( a, pol );
        std::istringstream in( text );
        std::size_t lines = 0;
        for ( std::string line; std::getline( in, line ); )
            if ( line.rfind( "trans:", 0 ) == 0 )
                ++lines;
        CHECK( lines == transition_count( a ) );
        CHECK( transition_count( a ) >= a.num_states() * a.num_actions() );

        auto again = parse_model( text );
        CHECK( serialize_model( again.sys, again.pol ) == text );
    }
    gen_params none;
    none.edge_percent = 0;
    CHECK( random_policy( none, 3 ) == closure( 3, {} ) );
}

TEST_CASE( "GN translation to the same cut is the identity" )
{
    auto m = load_model( "fig6.ni" );
    auto v = check_cut_family( m.sys, m.pol, base_notion::gn, cut_family::all, at( 3 ) );
    REQUIRE( !v.secure() );
    const auto& f = v.findings.front();
    auto t = translate_gn_vulnerability( m.sys, m.pol, f, *f.where );
    CHECK( std::get< gn_vulnerability >( t.detail ).beta == std::get< gn_vulnerability >( f.detail ).beta );
    CHECK( !revalidate( t ) );
}

TEST_CASE( "GN translation to the high-up cut of the acting domain" )
{
    auto m = load_model( "fig6.ni" );
    auto v = check_cut_family( m.sys, m.pol, base_notion::gn, cut_family::all, at( 3 ) );
    REQUIRE( !v.secure() );
    for ( const auto& f : v.findings )
    {
        const auto& g = std::get< gn_vulnerability >( f.detail );
        auto up = high_up_cut( m.pol, m.sys.domain_of( g.a ) );
        REQUIRE( up );
        auto t = translate_gn_vulnerability( m.sys, m.pol, f, *up );
        CHECK( t.where == up );
        CHECK( !revalidate( t ) );
    }
}

TEST_CASE( "NDI translation to the low-down cut of the victim" )
{
    auto m = load_model( "fig5.ni" );
    auto sw = check_ndi_sw( m.sys, m.pol, at( 4, 2, 5 ) );
    REQUIRE( !sw.secure() );
    const auto& f = sw.findings.front();
    auto l = *m.sys.find_domain( "L" );
    auto down = low_down_cut( m.pol, l );
    REQUIRE( down );
    auto t = translate_ndi_vulnerability( m.sys, m.pol, f, *down );
    CHECK( !revalidate( t ) );
    auto same = translate_ndi_vulnerability( m.sys, m.pol, t, *down );
    CHECK( std::get< ndi_vulnerability >( same.detail ).beta == std::get< ndi_vulnerability >( t.detail ).beta );
}

TEST_CASE( "translations fail loudly without their prerequisites" )
{
    auto m = load_model( "fig6.ni" );
    auto v = check_cut_family( m.sys, m.pol, base_notion::gn, cut_family::all, at( 3 ) );
    REQUIRE( !v.secure() );
    // ({H,L2},{L1}) splits the victim block {L1,L2}.
    cut split{ named( m.sys, { "H", "L2" } ), named( m.sys, { "L1" } ) };
    REQUIRE( is_cut( m.pol, split ) );
    try
    {
        translate_gn_vulnerability( m.sys, m.pol, v.findings.front(), split );
        FAIL( "translated" );
    }
    catch ( const error& e )
    {
        CHECK( e.code() == errc::prerequisite_violated );
    }
    CHECK_THROWS_AS( translate_ndi_vulnerability( m.sys, m.pol, v.findings.front(), split ), error );
}

// The literal NDI translation needs more than F ⊆ G: with attackers M in the source and M
// inside the target's victim block, the translated tuple is no vulnerability.
TEST_CASE( "NDI translation needs the attackers outside the target victim block" )
{
    auto m = parse_model( R"(system sub
options: implicit_self_loops=true
domains: H, M, L
actions: h@H, m@M, l@L
states: sI*, s1
obs H: *=⊥
obs M: *=⊥
obs L: sI=0, s1=1
trans: sI -m-> s1
policy: L -> M, M -> H
policy-closure: true
)" );
    const auto& base = m.sys;
    cut c0{ named( base, { "H", "M" } ), named( base, { "L" } ) };
    cut c1{ named( base, { "H" } ), named( base, { "M", "L" } ) };
    REQUIRE( is_cut( m.pol, c0 ) );
    REQUIRE( is_cut( m.pol, c1 ) );

    auto abs0 = to_abstraction( c0, base.num_domains() );
    auto sys0 = abstract_system( base, abs0 );
    auto pol0 = abstract_policy( m.pol, abs0 );
    auto r = parse_run( base, "sI m s1" );
    vulnerability v0{ sys0, pol0, c0, ndi_vulnerability{ 1, domain_set{ 0 }, {}, compute_view( sys0, 1, r ) } };
    REQUIRE( !revalidate( v0 ) );

    auto abs1 = to_abstraction( c1, base.num_domains() );
    auto sys1 = abstract_system( base, abs1 );
    auto pol1 = abstract_policy( m.pol, abs1 );
    vulnerability literal{ sys1, pol1, c1, ndi_vulnerability{ 1, domain_set{ 0 }, {}, compute_view( sys1, 1, r ) } };
    CHECK( revalidate( literal ) );

    try
    {
        translate_ndi_vulnerability( base, m.pol, v0, c1 );
        FAIL( "translated" );
    }
    catch ( const error& e )
    {
        CHECK( e.code() == errc::prerequisite_violated );
    }
}

TEST_CASE( "random translations revalidate" )
{
    std::size_t gn_done = 0, ndi_done = 0;
    for ( std::uint64_t seed = 1; seed <= 400 && ( gn_done < 100 || ndi_done < 100 ); ++seed )
    {
        gen_params p;
        p.seed = seed;
        p.min_domains = 3;
        auto sys = random_system( p );
        auto pol = random_policy( p, sys.num_domains() );
        for ( auto base : { base_notion::gn, base_notion::ndi } )
        {
            auto v = check_cut_family( sys, pol, base, cut_family::all, at( 3, 2, 5 ) );
            if ( v.secure() )
                continue;
            for ( const auto& target : all_cuts( pol ) )
                try
                {
                    auto t = base == base_notion::gn ? translate_gn_vulnerability( sys, pol, v.findings.front(), target )
                                                     : translate_ndi_vulnerability( sys, pol, v.findings.front(), target );
                    CHECK( !revalidate( t ) );
                    ++( base == base_notion::gn ? gn_done : ndi_done );
                }
                catch ( const error& e )
                {
                    CHECK( e.code() == errc::prerequisite_violated );
                }
        }
    }
    CHECK( gn_done >= 100 );
    CHECK( ndi_done >= 100 );
}

TEST_CASE( "NDI to GN and widening" )
{
    auto m = load_model( "fig5.ni" );
    auto sw = check_ndi_sw( m.sys, m.pol, at( 4, 2, 5 ) );
    REQUIRE( !sw.secure() );
    auto g = gn_from_ndi_vulnerability( sw.findings.front() );
    CHECK( std::holds_alternative< gn_vulnerability >( g.detail ) );
    CHECK( !revalidate( g ) );

    auto f6 = load_model( "fig6.ni" );
    auto h = check( notion::h_ndi, f6.sys, f6.pol, at( 3 ) );
    REQUIRE( !h.secure() );
    auto w = widen_ndi_vulnerability( h.findings.front() );
    CHECK( !revalidate( w ) );
}

TEST_CASE( "lattice consistency on the corpus" )
{
    lattice_report total;
    for ( const auto& name : bundled_model_names() )
    {
        auto m = load_model( name );
        total.merge( lattice_consistency( m.sys, m.pol, at( 3 ), name ) );
    }
    for ( const auto& v : total.violations )
        MESSAGE( v.label << ": " << display_name( v.stronger ) << " -> " << display_name( v.weaker ) << ": "
                         << v.reason );
    CHECK( total.violations.empty() );
    CHECK( total.translations > 0 );
    CHECK( total.edges_checked == 30 * total.systems );
}

TEST_CASE( "lattice consistency catches a broken checker" )
{
    // Claims L-GN security whatever happens.
    profiler broken = []( const nicheck::system& sys, const policy& pol, const check_options& opt ) {
        auto vs = profile( sys, pol, opt );
        for ( auto& v : vs )
            if ( v.which == notion::l_gn )
                v.findings.clear();
        return vs;
    };
    auto m = load_model( "fig4.ni" );
    auto r = lattice_consistency( m.sys, m.pol, at( 4 ), "fig4", broken );
    CHECK( !r.violations.empty() );
    bool named_edge = false;
    for ( const auto& v : r.violations )
        if ( v.stronger == notion::l_gn && v.weaker == notion::gn_pw )
            named_edge = true;
    CHECK( named_edge );
    CHECK( lattice_consistency( m.sys, m.pol, at( 4 ), "fig4" ).violations.empty() );
}

TEST_CASE( "random lattice consistency" )
{
    gen_params p;
    p.min_domains = 3;
    auto r = lattice_consistency_check( 40, p, at( 3 ) );
    CHECK( r.systems == 40 );
    CHECK( r.violations.empty() );
}

TEST_CASE( "policy supersets" )
{
    auto two = closure( 2, {} );
    CHECK( policy_supersets( two ).size() == 3 );
    auto m = load_model( "fig5.ni" );
    for ( const auto& p : policy_supersets( m.pol ) )
    {
        CHECK( p.contains( m.pol ) );
        CHECK( p != m.pol );
        CHECK( p.is_transitive() );
    }
}

TEST_CASE( "monotonicity" )
{
    auto f6 = load_model( "fig6.ni" );
    auto l1 = *f6.sys.find_domain( "L1" );
    auto l2 = *f6.sys.find_domain( "L2" );
    auto r = monotonicity_check( f6.sys, f6.pol, notion::l_gn, at( 3 ) );
    CHECK( r.base.secure() );
    CHECK( r.exhaustive );
    bool found = false;
    for ( const auto& f : r.flips )
        if ( f.added == std::vector< edge >{ { l1, l2 } } )
            found = true;
    CHECK( found );

    for ( const auto* name : { "fig5.ni", "fig6.ni" } )
    {
        auto m = load_model( name );
        for ( auto n : { notion::gn_pw, notion::h_gn, notion::c_gn, notion::ndi_pw, notion::ndi_sw, notion::c_ndi } )
            CHECK( monotonicity_check( m.sys, m.pol, n, at( 3, 3, 7 ) ).flips.empty() );
    }
}
