#include <symdel/properties.hpp>
#include <symdel/scenario.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace
{

int check_command( const std::string& path, bool minimize, bool trace, bool json )
{
    auto sc = symdel::load_scenario( path );
    auto r = symdel::run( sc, { minimize } );
    if ( json )
        std::cout << symdel::run_json( r, trace ).dump( 2 ) << "\n";
    else
        std::cout << symdel::format_run( r, trace );
    return r.ok() ? 0 : 1;
}

int translate_command( const std::string& path, const std::string& to )
{
    auto sc = symdel::load_scenario( path );
    auto target = to == "action" ? symdel::translate_target::action : symdel::translate_target::transformer;
    std::cout << symdel::write_scenario( symdel::translate( sc, target ) );
    return 0;
}

int prove_command( const symdel::suite_options& opt )
{
    bool ok = true;
    for ( const auto& line : symdel::run_suite( opt ) )
    {
        std::printf( "%-16s %5zu instances %9zu comparisons %4zu failures %8.2fs\n", line.name.c_str(), line.instances,
                     line.comparisons, line.failures, line.seconds );
        if ( !line.ok() )
        {
            ok = false;
            std::printf( "  first counterexample: %s\n", line.first_counterexample.c_str() );
        }
    }
    std::printf( "%s\n", ok ? "all properties hold" : "counterexample found" );
    return ok ? 0 : 1;
}

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "Symbolic dynamic epistemic model checker" };
    app.require_subcommand( 1 );

    std::string path;
    bool minimize = false, trace = false, json = false;
    auto* check = app.add_subcommand( "check", "run a scenario and evaluate its checks" );
    check->add_option( "file", path, "scenario file" )->required();
    check->add_flag( "--minimize", minimize, "remove determined propositions after each step" );
    check->add_flag( "--trace", trace, "also show each transform result before minimization" );
    check->add_flag( "--json", json, "machine-readable output" );

    std::string to;
    auto* translate = app.add_subcommand( "translate", "turn events into action models or back" );
    translate->add_option( "file", path, "scenario file" )->required();
    translate->add_option( "--to", to, "target kind" )->required()->check( CLI::IsMember( { "action", "transformer" } ) );

    symdel::suite_options opt;
    auto* prove = app.add_subcommand( "prove", "run the seeded property suites" );
    prove->add_option( "--seed", opt.seed, "first seed" );
    prove->add_option( "--count", opt.count, "instances per suite" );
    prove->add_option( "--depth", opt.depth, "modal depth of the formula family" );
    prove->add_option( "--max-vars", opt.limits.vocabulary, "vocabulary size bound" );
    prove->add_option( "--max-agents", opt.limits.agents, "agent count bound" );
    bool mutate = false;
    prove->add_flag( "--drop-circling", mutate, "leave old observations uncircled (for mutation testing)" );

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::ParseError& e )
    {
        return app.exit( e ) == 0 ? 0 : 2;
    }

    try
    {
        if ( *check )
            return check_command( path, minimize, trace, json );
        if ( *translate )
            return translate_command( path, to );
        opt.transform.circle_observations = !mutate;
        return prove_command( opt );
    }
    catch ( const symdel::error& e )
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
