#include "nicheck/policy.hpp"

#include "nicheck/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace nicheck
{

domain_set policy::successors( domain_id u ) const
{
    return _succ[ u ];
}

domain_set policy::interferers( domain_id u ) const
{
    domain_set out;
    for ( domain_id v = 0; v < size(); ++v )
        if ( allows( v, u ) )
            out.insert( v );
    return out;
}

domain_set policy::noninterferers( domain_id u ) const
{
    return domain_set::all( size() ) - interferers( u );
}

std::vector< edge > policy::edges() const
{
    std::vector< edge > out;
    for ( domain_id u = 0; u < size(); ++u )
        for ( auto v : _succ[ u ].members() )
            out.emplace_back( u, v );
    return out;
}

bool policy::is_reflexive() const
{
    for ( domain_id u = 0; u < size(); ++u )
        if ( !allows( u, u ) )
            return false;
    return true;
}

bool policy::is_transitive() const
{
    for ( domain_id u = 0; u < size(); ++u )
        for ( auto v : _succ[ u ].members() )
            if ( !_succ[ v ].subset_of( _succ[ u ] ) )
                return false;
    return true;
}

bool policy::contains( const policy& other ) const
{
    if ( other.size() != size() )
        return false;
    for ( domain_id u = 0; u < size(); ++u )
        if ( !other._succ[ u ].subset_of( _succ[ u ] ) )
            return false;
    return true;
}

namespace
{

void check_domain( const policy& p, domain_id u )
{
    if ( u >= p.size() )
        throw error{ errc::unknown_domain, "domain index " + std::to_string( u ) + " is out of range" };
}

std::vector< domain_set > raw_successors( std::size_t n, std::span< const edge > edges )
{
    std::vector< domain_set > succ( n );
    for ( const auto& [ u, v ] : edges )
    {
        if ( u >= n || v >= n )
            throw error{ errc::unknown_domain, "policy edge over an undeclared domain" };
        succ[ u ].insert( v );
    }
    return succ;
}

} // namespace

policy validate_policy( std::span< const std::string > domains, std::span< const edge > edges )
{
    auto succ = raw_successors( domains.size(), edges );
    for ( domain_id u = 0; u < domains.size(); ++u )
        if ( !succ[ u ].contains( u ) )
            throw error{ errc::not_reflexive, "policy is not reflexive at '" + domains[ u ] + "'" };
    for ( domain_id u = 0; u < domains.size(); ++u )
        for ( auto v : succ[ u ].members() )
            for ( auto w : succ[ v ].members() )
                if ( !succ[ u ].contains( w ) )
                    throw error{ errc::not_transitive, "policy is not transitive: '" + domains[ u ] + "' -> '" +
                                                           domains[ v ] + "' -> '" + domains[ w ] + "' without '" +
                                                           domains[ u ] + "' -> '" + domains[ w ] + "'" };
    return policy{ std::move( succ ) };
}

policy closure( std::size_t num_domains, std::span< const edge > edges )
{
    auto succ = raw_successors( num_domains, edges );
    for ( domain_id u = 0; u < num_domains; ++u )
        succ[ u ].insert( u );
    // Warshall over bit rows.
    for ( domain_id k = 0; k < num_domains; ++k )
        for ( domain_id u = 0; u < num_domains; ++u )
            if ( succ[ u ].contains( k ) )
                succ[ u ] = succ[ u ] | succ[ k ];
    return policy{ std::move( succ ) };
}

domain_set successors( const policy& p, domain_id u )
{
    check_domain( p, u );
    return p.successors( u );
}

domain_set interferers( const policy& p, domain_id u )
{
    check_domain( p, u );
    return p.interferers( u );
}

domain_set noninterferers( const policy& p, domain_id u )
{
    check_domain( p, u );
    return p.noninterferers( u );
}

abstraction::abstraction( std::size_t num_domains, std::vector< domain_set > blocks )
    : _blocks{ std::move( blocks ) }, _block_of( num_domains, ~std::size_t{ 0 } )
{
    for ( std::size_t b = 0; b < _blocks.size(); ++b )
    {
        if ( _blocks[ b ].empty() )
            throw error{ errc::block_mismatch, "abstraction blocks must be nonempty" };
        for ( auto d : _blocks[ b ].members() )
        {
            if ( d >= num_domains )
                throw error{ errc::block_mismatch, "abstraction block names an unknown domain" };
            if ( _block_of[ d ] != ~std::size_t{ 0 } )
                throw error{ errc::block_mismatch, "abstraction blocks must be disjoint" };
            _block_of[ d ] = b;
        }
    }
    if ( std::find( _block_of.begin(), _block_of.end(), ~std::size_t{ 0 } ) != _block_of.end() )
        throw error{ errc::block_mismatch, "abstraction blocks must cover every domain" };
}

abstraction singleton_abstraction( std::size_t num_domains )
{
    std::vector< domain_set > blocks;
    for ( domain_id d = 0; d < num_domains; ++d )
        blocks.push_back( domain_set{ d } );
    return { num_domains, std::move( blocks ) };
}

bool is_cut( const policy& p, const cut& c )
{
    if ( c.high.empty() || c.low.empty() || !( c.high & c.low ).empty() ||
         ( c.high | c.low ) != domain_set::all( p.size() ) )
        return false;
    for ( auto u : c.high.members() )
        if ( !( p.successors( u ) & c.low ).empty() )
            return false;
    return true;
}

abstraction to_abstraction( const cut& c, std::size_t num_domains )
{
    return { num_domains, { c.high, c.low } };
}

std::optional< cut > high_up_cut( const policy& p, domain_id u )
{
    check_domain( p, u );
    auto high = p.successors( u );
    auto low = domain_set::all( p.size() ) - high;
    if ( low.empty() )
        return std::nullopt;
    return cut{ high, low };
}

std::optional< cut > low_down_cut( const policy& p, domain_id u )
{
    check_domain( p, u );
    auto low = p.interferers( u );
    auto high = domain_set::all( p.size() ) - low;
    if ( high.empty() )
        return std::nullopt;
    return cut{ high, low };
}

std::vector< cut > all_cuts( const policy& p )
{
    std::vector< cut > out;
    auto everything = domain_set::all( p.size() );
    for ( std::uint64_t mask = 1; mask < everything.bits(); ++mask )
    {
        cut c{ domain_set( mask ), everything - domain_set( mask ) };
        if ( is_cut( p, c ) )
            out.push_back( c );
    }
    return out;
}

policy abstract_policy( const policy& p, const abstraction& abs )
{
    if ( abs.num_domains() != p.size() )
        throw error{ errc::block_mismatch, "abstraction and policy range over different domain sets" };
    std::vector< domain_set > succ( abs.blocks().size() );
    for ( domain_id u = 0; u < p.size(); ++u )
        for ( auto v : p.successors( u ).members() )
            succ[ abs.block_of( u ) ].insert( static_cast< domain_id >( abs.block_of( v ) ) );
    return policy{ std::move( succ ) };
}

system abstract_system( const system& sys, const abstraction& abs )
{
    if ( abs.num_domains() != sys.num_domains() )
        throw error{ errc::block_mismatch, "abstraction and system range over different domain sets" };
    const auto& base = sys.raw();
    system::parts p;
    p.name = base.name;
    p.state_names = base.state_names;
    p.action_names = base.action_names;
    p.initial = base.initial;
    p.succ = base.succ;
    for ( action_id a = 0; a < sys.num_actions(); ++a )
        p.action_domain.push_back( static_cast< domain_id >( abs.block_of( sys.domain_of( a ) ) ) );

    for ( const auto& block : abs.blocks() )
    {
        std::vector< std::string > members;
        for ( auto d : block.members() )
            members.push_back( sys.domain_name( d ) );
        if ( members.size() == 1 )
            p.domain_names.push_back( members.front() );
        else
        {
            std::string name = "{";
            for ( std::size_t i = 0; i < members.size(); ++i )
                name += ( i ? "," : "" ) + members[ i ];
            p.domain_names.push_back( name + "}" );
        }
        p.members.push_back( std::move( members ) );
    }

    // Coalition observations, interned in lexicographic order of their components.
    std::vector< std::vector< std::vector< std::string > > > tuples( abs.blocks().size() ); // [block][state]
    std::set< std::vector< std::string > > alphabet;
    for ( std::size_t b = 0; b < abs.blocks().size(); ++b )
        for ( state_id s = 0; s < sys.num_states(); ++s )
        {
            std::vector< std::string > parts;
            for ( auto d : abs.blocks()[ b ].members() )
                parts.push_back( sys.obs_name( sys.observe( d, s ) ) );
            alphabet.insert( parts );
            tuples[ b ].push_back( std::move( parts ) );
        }
    std::map< std::vector< std::string >, obs_id > ids;
    for ( const auto& parts : alphabet )
    {
        ids.emplace( parts, static_cast< obs_id >( p.obs_names.size() ) );
        if ( parts.size() == 1 )
            p.obs_names.push_back( parts.front() );
        else
        {
            std::string name = "(";
            for ( std::size_t i = 0; i < parts.size(); ++i )
                name += ( i ? "," : "" ) + parts[ i ];
            p.obs_names.push_back( name + ")" );
        }
        p.obs_parts.push_back( parts );
    }
    p.obs.resize( abs.blocks().size() );
    for ( std::size_t b = 0; b < abs.blocks().size(); ++b )
        for ( state_id s = 0; s < sys.num_states(); ++s )
            p.obs[ b ].push_back( ids.at( tuples[ b ][ s ] ) );
    return system{ std::move( p ) };
}

domain_set members_in( const system& abstracted, domain_id block, const system& base )
{
    domain_set out;
    for ( const auto& name : abstracted.members( block ) )
    {
        auto d = base.find_domain( name );
        if ( !d )
            throw error{ errc::block_mismatch, "block member '" + name + "' is not a domain of the base system" };
        out.insert( *d );
    }
    return out;
}

std::optional< domain_id > find_block( const system& abstracted, const system& base, domain_set ds )
{
    for ( domain_id b = 0; b < abstracted.num_domains(); ++b )
        if ( members_in( abstracted, b, base ) == ds )
            return b;
    return std::nullopt;
}

view project_view( const system& from, domain_id g, const view& v, const system& to, domain_id f )
{
    auto g_members = from.members( g );
    auto f_members = to.members( f );
    std::vector< std::size_t > positions;
    for ( const auto& m : f_members )
    {
        auto it = std::find( g_members.begin(), g_members.end(), m );
        if ( it == g_members.end() )
            throw error{ errc::not_sub_block, "'" + to.domain_name( f ) + "' is not contained in '" +
                                                  from.domain_name( g ) + "'" };
        positions.push_back( static_cast< std::size_t >( it - g_members.begin() ) );
    }
    if ( !is_well_formed_view( from, g, v ) )
        throw error{ errc::malformed_view, "not a view of '" + from.domain_name( g ) + "'" };

    std::map< std::vector< std::string >, obs_id > to_obs;
    for ( obs_id o = 0; o < to.num_observations(); ++o )
    {
        auto parts = to.obs_parts( o );
        to_obs.emplace( std::vector< std::string >{ parts.begin(), parts.end() }, o );
    }

    view out;
    for ( const auto& item : v )
    {
        if ( item.is_action() )
        {
            auto a = to.find_action( from.action_name( item.id ) );
            if ( !a )
                throw error{ errc::malformed_view, "action '" + from.action_name( item.id ) + "' is unknown" };
            if ( to.domain_of( *a ) == f )
                out = abs_concat( std::move( out ), view{ view_item::act( *a ) } );
            continue;
        }
        auto parts = from.obs_parts( item.id );
        std::vector< std::string > restricted;
        for ( auto pos : positions )
            restricted.push_back( parts[ pos ] );
        auto it = to_obs.find( restricted );
        if ( it == to_obs.end() )
            throw error{ errc::malformed_view, "observation '" + from.obs_name( item.id ) +
                                                   "' has no counterpart for '" + to.domain_name( f ) + "'" };
        out = abs_concat( std::move( out ), view{ view_item::obs( it->second ) } );
    }
    return out;
}

std::string render_domain_set( const system& sys, domain_set ds )
{
    std::string out = "{";
    bool first = true;
    for ( auto d : ds.members() )
    {
        out += ( first ? "" : "," ) + sys.domain_name( d );
        first = false;
    }
    return out + "}";
}

std::string render_cut( const system& sys, const cut& c )
{
    return "(" + render_domain_set( sys, c.high ) + ", " + render_domain_set( sys, c.low ) + ")";
}

} // namespace nicheck
