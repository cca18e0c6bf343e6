#include "oracles.hpp"

#include "nicheck/error.hpp"
#include "nicheck/harness.hpp"
#include "nicheck/model_file.hpp"
#include "nicheck/policy.hpp"

#include <doctest.h>

#include <random>

using namespace nicheck;

namespace
{

domain_set named( const nicheck::system& sys, std::initializer_list< const char* > names )
{
    domain_set out;
    for ( const auto* n : names )
        out.insert( *sys.find_domain( n ) );
    return out;
}

errc error_of( auto&& f )
{
    try
    {
        f();
    }
    catch ( const error& e )
    {
        return e.code();
    }
    FAIL( "no error" );
    return errc::syntax_error;
}

} // namespace

TEST_CASE( "validate_policy" )
{
    std::vector< std::string > hl{ "H", "L" };
    std::vector< edge > ok{ { 0, 0 }, { 1, 1 }, { 1, 0 } };
    CHECK( validate_policy( hl, ok ).noninterferers( 1 ) == domain_set{ 0 } );

    std::vector< std::string > ab{ "A", "B" };
    std::vector< edge > only_a{ { 0, 0 } };
    CHECK( error_of( [ & ] { validate_policy( ab, only_a ); } ) == errc::not_reflexive );

    std::vector< std::string > abc{ "A", "B", "C" };
    std::vector< edge > chain{ { 0, 0 }, { 1, 1 }, { 2, 2 }, { 0, 1 }, { 1, 2 } };
    CHECK( error_of( [ & ] { validate_policy( abc, chain ); } ) == errc::not_transitive );
}

TEST_CASE( "closure" )
{
    auto id = closure( 2, {} );
    CHECK( id.edges() == std::vector< edge >{ { 0, 0 }, { 1, 1 } } );
    std::vector< edge > chain{ { 0, 1 }, { 1, 2 } };
    auto c = closure( 3, chain );
    CHECK( c.allows( 0, 2 ) );
    CHECK( c.is_reflexive() );
    CHECK( c.is_transitive() );

    auto mls = load_model( "mls.ni" );
    CHECK( mls.pol.allows( *mls.sys.find_domain( "U" ), *mls.sys.find_domain( "TS" ) ) );
}

TEST_CASE( "successors, interferers, noninterferers" )
{
    auto m = load_model( "mls.ni" );
    const auto& sys = m.sys;
    CHECK( successors( m.pol, *sys.find_domain( "C1" ) ) == named( sys, { "C1", "S1", "TS" } ) );
    for ( domain_id u = 0; u < sys.num_domains(); ++u )
    {
        CHECK( interferers( m.pol, u ).contains( u ) );
        CHECK( ( interferers( m.pol, u ) | noninterferers( m.pol, u ) ) == sys.all_domains() );
    }
    CHECK( error_of( [ & ] { successors( m.pol, 17 ); } ) == errc::unknown_domain );
}

TEST_CASE( "high-up and low-down cuts" )
{
    auto f8 = load_model( "fig8.ni" );
    auto c = *f8.sys.find_domain( "C" );
    auto up = high_up_cut( f8.pol, c );
    REQUIRE( up );
    CHECK( up->high == named( f8.sys, { "C", "D" } ) );
    CHECK( up->low == named( f8.sys, { "A", "B", "E" } ) );
    auto down = low_down_cut( f8.pol, c );
    REQUIRE( down );
    CHECK( down->high == named( f8.sys, { "D", "E" } ) );
    CHECK( down->low == named( f8.sys, { "A", "B", "C" } ) );

    auto f4 = load_model( "fig4.ni" );
    CHECK( high_up_cut( f4.pol, 0 ) == cut{ domain_set{ 0 }, domain_set{ 1 } } );
    CHECK( low_down_cut( f4.pol, 1 ) == cut{ domain_set{ 0 }, domain_set{ 1 } } );

    auto mls = load_model( "mls.ni" );
    CHECK( !high_up_cut( mls.pol, *mls.sys.find_domain( "U" ) ) );
    CHECK( !low_down_cut( mls.pol, *mls.sys.find_domain( "TS" ) ) );
}

TEST_CASE( "all_cuts agrees with brute force" )
{
    auto mls = load_model( "mls.ni" );
    auto cuts = all_cuts( mls.pol );
    cut fig2{ named( mls.sys, { "S1", "S2", "TS" } ), named( mls.sys, { "U", "C1", "C2" } ) };
    CHECK( std::find( cuts.begin(), cuts.end(), fig2 ) != cuts.end() );

    std::vector< policy > policies{ mls.pol, load_model( "fig8.ni" ).pol, load_model( "fig6.ni" ).pol };
    for ( std::uint64_t seed = 1; seed <= 50; ++seed )
    {
        gen_params p;
        p.seed = seed;
        policies.push_back( random_policy( p, 2 + seed % 7 ) );
    }
    for ( const auto& pol : policies )
    {
        auto mine = all_cuts( pol );
        auto brute = oracle::brute_cuts( pol );
        REQUIRE( mine.size() == brute.size() );
        for ( std::size_t i = 0; i < mine.size(); ++i )
        {
            CHECK( mine[ i ].high.bits() == brute[ i ].first );
            CHECK( mine[ i ].low.bits() == brute[ i ].second );
            CHECK( is_cut( pol, mine[ i ] ) );
        }
        for ( domain_id u = 0; u < pol.size(); ++u )
            for ( auto c : { high_up_cut( pol, u ), low_down_cut( pol, u ) } )
                if ( c )
                    CHECK( std::find( mine.begin(), mine.end(), *c ) != mine.end() );
    }
}

TEST_CASE( "abstract_policy" )
{
    auto mls = load_model( "mls.ni" );
    cut fig2{ named( mls.sys, { "S1", "S2", "TS" } ), named( mls.sys, { "U", "C1", "C2" } ) };
    auto p = abstract_policy( mls.pol, to_abstraction( fig2, mls.sys.num_domains() ) );
    CHECK( p.allows( 1, 0 ) );
    CHECK( !p.allows( 0, 1 ) );

    auto single = abstract_policy( mls.pol, singleton_abstraction( mls.sys.num_domains() ) );
    CHECK( single == mls.pol );

    // A -> B, C -> D with blocks {A}, {B,C}, {D}: the result is not transitive.
    std::vector< edge > e{ { 0, 1 }, { 2, 3 } };
    auto four = closure( 4, e );
    abstraction abs{ 4, { domain_set{ 0 }, domain_set{ 1, 2 }, domain_set{ 3 } } };
    auto q = abstract_policy( four, abs );
    CHECK( q.allows( 0, 1 ) );
    CHECK( q.allows( 1, 2 ) );
    CHECK( !q.allows( 0, 2 ) );
    CHECK( !q.is_transitive() );

    CHECK_THROWS_AS( ( abstraction{ 3, { domain_set{ 0 }, domain_set{ 0, 1 } } } ), error );
    CHECK_THROWS_AS( ( abstraction{ 3, { domain_set{ 0 }, domain_set{ 1 } } } ), error );
}

TEST_CASE( "abstract_system" )
{
    auto m = load_model( "fig6.ni" );
    cut up{ named( m.sys, { "H" } ), named( m.sys, { "L1", "L2" } ) };
    auto sys = abstract_system( m.sys, to_abstraction( up, m.sys.num_domains() ) );
    CHECK( sys.num_domains() == 2 );
    CHECK( sys.domain_name( 1 ) == "{L1,L2}" );
    CHECK( sys.obs_name( sys.observe( 1, *sys.find_state( "s13" ) ) ) == "(0,1)" );
    auto r = parse_run( sys, "s0 h s0' l1 s5 l2 s13" );
    CHECK( render_view( sys, compute_view( sys, 1, r ) ) == "(⊥,⊥) l1 (0,⊥) l2 (0,1)" );

    auto same = abstract_system( m.sys, singleton_abstraction( m.sys.num_domains() ) );
    for ( const auto& run : enumerate_runs( m.sys, 3 ) )
        for ( domain_id d = 0; d < m.sys.num_domains(); ++d )
            CHECK( oracle::naive_view( same, d, run ) == oracle::naive_view( m.sys, d, run ) );
}

TEST_CASE( "project_view" )
{
    auto m = load_model( "fig6.ni" );
    cut up{ named( m.sys, { "H" } ), named( m.sys, { "L1", "L2" } ) };
    auto sys = abstract_system( m.sys, to_abstraction( up, m.sys.num_domains() ) );
    auto r = parse_run( sys, "s0 h s0' l1 s5 l2 s13" );
    auto g = compute_view( sys, 1, r );
    CHECK( project_view( sys, 1, g, sys, 1 ) == g );
    auto l1 = *m.sys.find_domain( "L1" );
    CHECK( render_view( m.sys, project_view( sys, 1, g, m.sys, l1 ) ) == "⊥ l1 0" );
    CHECK_THROWS_AS( project_view( sys, 0, compute_view( sys, 0, r ), m.sys, l1 ), error );
}

TEST_CASE( "projection of a coalition view is the member's view" )
{
    std::mt19937_64 rng{ 7 };
    std::size_t checked = 0;
    for ( std::uint64_t seed = 1; checked < 200; ++seed )
    {
        gen_params p;
        p.seed = seed;
        p.min_domains = 3;
        p.max_domains = 4;
        auto sys = random_system( p );
        const auto n = sys.num_domains();
        std::vector< domain_set > blocks;
        for ( domain_id d = 0; d < n; ++d )
        {
            auto b = rng() % ( blocks.size() + 1 );
            if ( b == blocks.size() )
                blocks.emplace_back();
            blocks[ b ].insert( d );
        }
        auto gi = rng() % blocks.size();
        auto members = blocks[ gi ].members();
        domain_set f;
        for ( auto d : members )
            if ( rng() % 2 )
                f.insert( d );
        if ( f.empty() )
            f.insert( members.front() );
        auto fine = blocks;
        fine[ gi ] = f;
        if ( !( blocks[ gi ] - f ).empty() )
            fine.push_back( blocks[ gi ] - f );

        auto coarse_sys = abstract_system( sys, abstraction{ n, blocks } );
        auto fine_sys = abstract_system( sys, abstraction{ n, fine } );
        auto runs = enumerate_runs( sys, 3 );
        auto& r = runs[ rng() % runs.size() ];
        auto g_view = compute_view( coarse_sys, static_cast< domain_id >( gi ), r );
        auto projected = project_view( coarse_sys, static_cast< domain_id >( gi ), g_view, fine_sys,
                                       static_cast< domain_id >( gi ) );
        CHECK( projected == compute_view( fine_sys, static_cast< domain_id >( gi ), r ) );
        ++checked;
    }
}
