#include "oracles.hpp"

#include "nicheck/analysis.hpp"
#include "nicheck/error.hpp"
#include "nicheck/harness.hpp"
#include "nicheck/model_file.hpp"

#include <doctest.h>

using namespace nicheck;

namespace
{

std::vector< action_id > acts( const nicheck::system& sys, std::string_view text )
{
    return parse_actions( sys, text );
}

// A witness must re-check by direct computation.
void check_witness( const nicheck::system& sys, domain_set x, const std::vector< action_id >& alpha, domain_id viewer,
                    const view& beta, const run& w )
{
    CHECK( is_valid_run( sys, w ) );
    std::vector< action_id > projected;
    for ( auto a : w.actions )
        if ( x.contains( sys.domain_of( a ) ) )
            projected.push_back( a );
    CHECK( projected == alpha );
    CHECK( compute_view( sys, viewer, w ) == beta );
}

} // namespace

TEST_CASE( "compatibility examples" )
{
    auto f5 = load_model( "fig5.ni" );
    const auto& s5 = f5.sys;
    auto l = *s5.find_domain( "L" );
    domain_set hh{ *s5.find_domain( "H1" ), *s5.find_domain( "H2" ) };
    auto beta = parse_view( s5, "0 l 1" );
    CHECK( !is_compatible( s5, hh, {}, l, beta ).compatible );
    CHECK( !oracle::brute_force_compatible( s5, hh, {}, l, beta, 6 ) );

    auto init = view{ view_item::obs( s5.observe( l, s5.initial() ) ) };
    auto c = is_compatible( s5, hh, {}, l, init );
    CHECK( c.compatible );
    REQUIRE( c.witness );
    CHECK( c.witness->length() == 0 );

    auto f4 = load_model( "fig4.ni" );
    const auto& s4 = f4.sys;
    auto l4 = *s4.find_domain( "L" );
    domain_set h{ *s4.find_domain( "H" ) };
    auto b4 = parse_view( s4, "0 l 1" );
    auto alpha = acts( s4, "h" );
    auto w = is_compatible( s4, h, alpha, l4, b4 );
    CHECK( w.compatible );
    REQUIRE( w.witness );
    CHECK( render_run( s4, *w.witness ) == "sI l s1 h s1" );
    check_witness( s4, h, alpha, l4, b4, *w.witness );
}

TEST_CASE( "exists_run_with_view examples" )
{
    auto f4 = load_model( "fig4.ni" );
    const auto& s = f4.sys;
    auto l = *s.find_domain( "L" );
    auto beta = parse_view( s, "0 l 1" );
    CHECK( !exists_run_with_view( s, acts( s, "h l" ), l, beta ).compatible );
    auto r = exists_run_with_view( s, acts( s, "l" ), l, beta );
    CHECK( r.compatible );
    REQUIRE( r.witness );
    CHECK( render_run( s, *r.witness ) == "sI l s1" );
    CHECK( exists_run_with_view( s, {}, l, parse_view( s, "0" ) ).compatible );
}

TEST_CASE( "compatibility errors" )
{
    auto f4 = load_model( "fig4.ni" );
    const auto& s = f4.sys;
    auto l = *s.find_domain( "L" );
    auto h = *s.find_domain( "H" );
    auto code = [ & ]( auto&& f ) {
        try
        {
            f();
        }
        catch ( const error& e )
        {
            return e.code();
        }
        return errc::syntax_error;
    };
    CHECK( code( [ & ] { is_compatible( s, domain_set{ h }, {}, l, parse_view( s, "1" ) ); } ) ==
           errc::view_initial_mismatch );
    CHECK( code( [ & ] { is_compatible( s, domain_set{ h }, acts( s, "l" ), l, parse_view( s, "0" ) ); } ) ==
           errc::foreign_action_in_alpha );
}

TEST_CASE( "stuttering observations never change the decision" )
{
    auto f4 = load_model( "fig4.ni" );
    const auto& s = f4.sys;
    auto l = *s.find_domain( "L" );
    domain_set h{ *s.find_domain( "H" ) };
    // "0 0" is not a view; absorption makes it "0".
    auto padded = abs_concat( parse_view( s, "0" ), parse_view( s, "0" ) );
    CHECK( is_compatible( s, h, {}, l, padded ).compatible == is_compatible( s, h, {}, l, parse_view( s, "0" ) ).compatible );
}

TEST_CASE( "is_compatible agrees with the brute-force oracle" )
{
    std::vector< nicheck::system > systems;
    for ( const auto* name : { "fig3.ni", "fig4.ni", "fig5.ni" } )
        systems.push_back( load_model( name ).sys );
    for ( std::uint64_t seed = 1; seed <= 8; ++seed )
    {
        gen_params p;
        p.seed = seed;
        systems.push_back( random_system( p ) );
    }
    std::size_t queries = 0;
    for ( const auto& sys : systems )
        for ( domain_id v = 0; v < sys.num_domains(); ++v )
        {
            auto x = sys.all_domains() - domain_set{ v };
            auto alphabet = sys.actions_of( x );
            std::vector< std::vector< action_id > > alphas{ {} };
            for ( std::size_t i = 0; i < alphas.size(); ++i )
                if ( alphas[ i ].size() < 3 )
                    for ( auto a : alphabet )
                    {
                        auto next = alphas[ i ];
                        next.push_back( a );
                        alphas.push_back( next );
                    }
            for ( const auto& beta : views_up_to_length( sys, v, 7 ) )
                for ( const auto& alpha : alphas )
                {
                    auto mine = is_compatible( sys, x, alpha, v, beta );
                    auto bound = oracle::product_bound( sys, alpha.size(), beta.size() );
                    CHECK( mine.compatible == oracle::brute_force_compatible( sys, x, alpha, v, beta, bound ) );
                    CHECK( mine.compatible == compatible( sys, x, alpha, v, beta ) );
                    if ( mine.witness )
                        check_witness( sys, x, alpha, v, beta, *mine.witness );
                    ++queries;
                }
        }
    CHECK( queries > 1000 );
}

TEST_CASE( "witnesses are shortest" )
{
    for ( std::uint64_t seed = 1; seed <= 10; ++seed )
    {
        gen_params p;
        p.seed = seed;
        auto sys = random_system( p );
        for ( domain_id v = 0; v < sys.num_domains(); ++v )
            for ( const auto& beta : views_up_to_length( sys, v, 5 ) )
            {
                auto w = run_with_view( sys, v, beta );
                REQUIRE( w );
                // No shorter run yields the view.
                bool shorter = false;
                for ( const auto& r : oracle::all_runs( sys, w->length() == 0 ? 0 : w->length() - 1 ) )
                    if ( r.length() < w->length() && compute_view( sys, v, r ) == beta )
                        shorter = true;
                CHECK( !shorter );
            }
    }
}
