// Serial vs OpenMP timings for the profile on larger random systems.
// Usage: bench_kernels [systems] [states]

#include "nicheck/harness.hpp"
#include "nicheck/model_file.hpp"
#include "nicheck/notions.hpp"
#include "nicheck/report.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

using namespace nicheck;

namespace
{

double timed( const std::vector< model >& models, execution exec, std::vector< std::string >& out )
{
    check_options opt;
    opt.limits = { 4, 3, 7 };
    opt.exec = exec;
    auto t0 = std::chrono::steady_clock::now();
    for ( const auto& m : models )
        out.push_back( make_report( m.sys, m.pol, profile( m.sys, m.pol, opt ) ).dump() );
    return std::chrono::duration< double, std::milli >( std::chrono::steady_clock::now() - t0 ).count();
}

} // namespace

int main( int argc, char** argv )
{
    std::size_t count = argc > 1 ? std::strtoul( argv[ 1 ], nullptr, 10 ) : 20;
    std::size_t states = argc > 2 ? std::strtoul( argv[ 2 ], nullptr, 10 ) : 10;

    std::vector< model > models;
    for ( std::uint64_t seed = 1; seed <= count; ++seed )
    {
        gen_params p;
        p.seed = seed;
        p.max_states = states;
        p.min_domains = 3;
        p.max_domains = 4;
        p.max_actions_per_domain = 2;
        p.obs_alphabet_size = 3;
        auto sys = random_system( p );
        auto pol = random_policy( p, sys.num_domains() );
        models.push_back( { std::move( sys ), std::move( pol ) } );
    }

    std::vector< std::string > serial_out, parallel_out;
    double serial = timed( models, execution::serial, serial_out );
    double parallel = timed( models, execution::parallel, parallel_out );
    std::printf( "systems=%zu states<=%zu\n", count, states );
    std::printf( "serial   %10.1f ms\n", serial );
    std::printf( "parallel %10.1f ms  (speedup %.2fx)\n", parallel, serial / parallel );
    if ( serial_out != parallel_out )
    {
        std::puts( "MISMATCH between serial and parallel reports" );
        return 1;
    }
    std::puts( "reports identical" );
}
