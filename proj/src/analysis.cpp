#include "nicheck/analysis.hpp"

#include "nicheck/error.hpp"

#include <algorithm>
#include <limits>

namespace nicheck
{

namespace
{

constexpr std::uint32_t unseen = std::numeric_limits< std::uint32_t >::max();

struct scratch
{
    std::vector< std::uint32_t > parent; // node -> predecessor node
    std::vector< action_id > via;        // node -> action taken into it
    std::vector< std::uint32_t > queue;
};

compatibility decide( const system& sys, domain_set x, std::span< const action_id > alpha, domain_id viewer,
                      const view& beta, bool want_witness )
{
    if ( beta.empty() || !beta.front().is_obs() ||
         beta.front().id != sys.observe( viewer, sys.initial() ) )
        throw error{ errc::view_initial_mismatch, "view does not start with the initial observation of '" +
                                                      sys.domain_name( viewer ) + "'" };
    for ( auto a : alpha )
        if ( !x.contains( sys.domain_of( a ) ) )
            throw error{ errc::foreign_action_in_alpha, "action '" + sys.action_name( a ) +
                                                            "' is not owned by the constrained domains" };

    const std::size_t na = alpha.size() + 1;
    const std::size_t nb = beta.size();
    const std::size_t nodes = sys.num_states() * na * nb;
    auto index = [ & ]( state_id s, std::size_t i, std::size_t j ) {
        return static_cast< std::uint32_t >( ( s * na + i ) * nb + j );
    };

    thread_local scratch w;
    w.parent.assign( nodes, unseen );
    if ( want_witness )
        w.via.resize( nodes );
    w.queue.clear();

    auto start = index( sys.initial(), 0, 0 );
    w.parent[ start ] = start;
    w.queue.push_back( start );

    std::optional< std::uint32_t > accepted;
    for ( std::size_t head = 0; head < w.queue.size() && !accepted; ++head )
    {
        auto node = w.queue[ head ];
        std::size_t j = node % nb;
        std::size_t i = ( node / nb ) % na;
        auto s = static_cast< state_id >( node / nb / na );
        if ( i + 1 == na && j + 1 == nb )
        {
            accepted = node;
            break;
        }
        for ( action_id a = 0; a < sys.num_actions(); ++a )
        {
            auto d = sys.domain_of( a );
            std::size_t ni = i;
            if ( x.contains( d ) )
            {
                if ( i == alpha.size() || alpha[ i ] != a )
                    continue;
                ni = i + 1;
            }
            bool own = d == viewer;
            if ( own && !( j + 2 < nb && beta[ j + 1 ] == view_item::act( a ) ) )
                continue;
            for ( auto t : sys.successors( s, a ) )
            {
                auto o = view_item::obs( sys.observe( viewer, t ) );
                std::size_t nj;
                if ( own )
                {
                    if ( beta[ j + 2 ] != o )
                        continue;
                    nj = j + 2;
                }
                else if ( beta[ j ] == o )
                    nj = j;
                else if ( j + 1 < nb && beta[ j + 1 ] == o )
                    nj = j + 1;
                else
                    continue;
                auto next = index( t, ni, nj );
                if ( w.parent[ next ] != unseen )
                    continue;
                w.parent[ next ] = node;
                if ( want_witness )
                    w.via[ next ] = a;
                w.queue.push_back( next );
            }
        }
    }

    compatibility out;
    if ( !accepted )
        return out;
    out.compatible = true;
    if ( want_witness )
    {
        run r;
        for ( auto node = *accepted;; node = w.parent[ node ] )
        {
            r.states.push_back( static_cast< state_id >( node / nb / na ) );
            if ( w.parent[ node ] == node )
                break;
            r.actions.push_back( w.via[ node ] );
        }
        std::reverse( r.states.begin(), r.states.end() );
        std::reverse( r.actions.begin(), r.actions.end() );
        out.witness = std::move( r );
    }
    return out;
}

} // namespace

compatibility is_compatible( const system& sys, domain_set x, std::span< const action_id > alpha, domain_id viewer,
                             const view& beta )
{
    return decide( sys, x, alpha, viewer, beta, true );
}

bool compatible( const system& sys, domain_set x, std::span< const action_id > alpha, domain_id viewer,
                 const view& beta )
{
    return decide( sys, x, alpha, viewer, beta, false ).compatible;
}

compatibility exists_run_with_view( const system& sys, std::span< const action_id > seq, domain_id viewer,
                                    const view& beta )
{
    return decide( sys, sys.all_domains(), seq, viewer, beta, true );
}

std::optional< run > run_with_view( const system& sys, domain_id viewer, const view& beta )
{
    return decide( sys, domain_set{}, {}, viewer, beta, true ).witness;
}

} // namespace nicheck
