#include "nicheck/error.hpp"
#include "nicheck/harness.hpp"
#include "nicheck/model_file.hpp"
#include "nicheck/report.hpp"

#include <doctest.h>

using namespace nicheck;
using nlohmann::json;

namespace
{

check_options at( std::size_t depth )
{
    check_options o;
    o.limits = { depth, 3, 7 };
    return o;
}

json report_for( const char* name )
{
    auto m = load_model( name );
    return make_report( m.sys, m.pol, profile( m.sys, m.pol, at( 3 ) ) );
}

} // namespace

TEST_CASE( "report shape" )
{
    auto r = report_for( "fig4.ni" );
    CHECK( r[ "format_version" ] == report_format_version );
    CHECK( r[ "system" ] == "fig4" );
    CHECK( r[ "verdicts" ].size() == 9 );
    for ( const auto& v : r[ "verdicts" ] )
    {
        CHECK( v[ "bounds" ][ "depth" ] == 3 );
        CHECK( ( v[ "status" ] == "INSECURE" ) == !v[ "vulnerabilities" ].empty() );
    }
    const auto& gn = r[ "verdicts" ][ 0 ];
    CHECK( gn[ "notion" ] == "GN_pw" );
    const auto& w = gn[ "vulnerabilities" ][ 0 ];
    CHECK( w[ "kind" ] == "GN" );
    CHECK( w[ "direction" ] == "PLUS" );
    CHECK( w[ "victim" ] == "L" );
    CHECK( w[ "action" ] == "h" );
    CHECK( w[ "beta" ] == json{ "0", "l", "1" } );
    CHECK( w[ "cut" ].is_null() );
}

TEST_CASE( "every corpus witness survives serialization" )
{
    std::size_t checked = 0;
    for ( const auto& name : bundled_model_names() )
    {
        auto text = report_for( name.c_str() ).dump();
        auto result = verify_report( json::parse( text ) );
        for ( const auto& f : result.failures )
            MESSAGE( name << ": " << f );
        CHECK( result.ok() );
        checked += result.checked;
    }
    CHECK( checked > 0 );
}

TEST_CASE( "vulnerability_from_json inverts vulnerability_to_json" )
{
    auto m = load_model( "fig6.ni" );
    for ( const auto& v : profile( m.sys, m.pol, at( 3 ) ) )
        for ( const auto& f : v.findings )
        {
            auto back = vulnerability_from_json( vulnerability_to_json( f ), m.sys, m.pol );
            CHECK( back.where == f.where );
            CHECK( back.pol == f.pol );
            CHECK( vulnerability_to_json( back ) == vulnerability_to_json( f ) );
            CHECK( !revalidate( back ) );
        }
}

TEST_CASE( "tampered witnesses are rejected" )
{
    auto r = report_for( "fig4.ni" );
    auto bad_view = r;
    bad_view[ "verdicts" ][ 0 ][ "vulnerabilities" ][ 0 ][ "beta" ] = json{ "0", "l", "0" };
    CHECK( !verify_report( bad_view ).ok() );

    auto bad_policy = r;
    bad_policy[ "verdicts" ][ 0 ][ "vulnerabilities" ][ 0 ][ "policy" ] = json::array();
    CHECK( !verify_report( bad_policy ).ok() );

    auto bad_name = r;
    bad_name[ "verdicts" ][ 0 ][ "vulnerabilities" ][ 0 ][ "action" ] = "zz";
    CHECK( !verify_report( bad_name ).ok() );

    auto bad_model = r;
    bad_model[ "model" ] = "system broken\n";
    CHECK_THROWS_AS( verify_report( bad_model ), error );

    auto no_version = r;
    no_version.erase( "format_version" );
    CHECK_THROWS_AS( verify_report( no_version ), error );
}

TEST_CASE( "human-readable rendering" )
{
    auto m = load_model( "fig5.ni" );
    auto v = check( notion::ndi_sw, m.sys, m.pol, at( 3 ) );
    auto text = render_verdict( v, m.sys );
    CHECK( text.starts_with( "NDI_sw: INSECURE" ) );
    CHECK( text.find( "NDI (L, {H1,H2}, ε, 0 l 1)" ) != std::string::npos );
    auto secure = check( notion::ndi_pw, m.sys, m.pol, at( 3 ) );
    CHECK( render_verdict( secure, m.sys ) == "NDI_pw: SECURE_UP_TO(depth=3, alpha=3, view=7)" );
}
