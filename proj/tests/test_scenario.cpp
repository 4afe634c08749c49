#include <symdel/scenario.hpp>

#include <gtest/gtest.h>

using namespace symdel;

namespace
{

std::string path( const std::string& name ) { return std::string( SCENARIO_DIR ) + "/" + name; }

bool_fn fn( const scene& sc, const std::string& text )
{
    const auto& f = sc.structure();
    return compile( f.engine(), parse( text ), make_environment( f.engine(), f.vocabulary(), true ) );
}

std::size_t error_line( const std::string& text )
{
    try
    {
        (void)run( parse_scenario( text ) );
    }
    catch ( const scenario_error& e )
    {
        return e.line;
    }
    return 0;
}

} // namespace

TEST( Scenario, ParsesTheCoin )
{
    auto sc = load_scenario( path( "coin.del" ) );
    EXPECT_EQ( sc.agents, ( std::vector< std::string >{ "a", "b" } ) );
    EXPECT_EQ( sc.vars, std::vector< std::string >{ "p" } );
    EXPECT_EQ( sc.law, parse( "p" ) );
    EXPECT_EQ( sc.obs.at( "a" ), parse( "p <-> p'" ) );
    EXPECT_EQ( sc.state, valuation{ "p" } );
    ASSERT_EQ( sc.steps.size(), 1u );
    const auto& e = std::get< event_step >( sc.steps[ 0 ] );
    EXPECT_EQ( e.name, "toss" );
    EXPECT_EQ( e.ev.trf.added, std::vector< std::string >{ "q" } );
    EXPECT_EQ( e.ev.trf.event_law, formula::top() );
    EXPECT_EQ( e.ev.actual, valuation{ "q" } );
    ASSERT_EQ( sc.queries.size(), 4u );
    EXPECT_EQ( sc.queries[ 0 ].after, 0u );
    EXPECT_EQ( sc.queries[ 1 ].after, 1u );
    EXPECT_EQ( sc.queries[ 2 ].expect, false );
}

TEST( Scenario, CoinRunMatchesTheHandComputedStructures )
{
    auto sc = load_scenario( path( "coin.del" ) );
    auto raw = run( sc );
    const auto& after = raw.steps.at( 1 ).current;
    EXPECT_EQ( after.structure().names(), ( std::vector< std::string >{ "p", "q", "p@o" } ) );
    EXPECT_EQ( after.structure().law(), fn( after, "p@o & (p <-> q)" ) );
    EXPECT_EQ( after.structure().observation( "b" ), fn( after, "(p@o <-> p@o') & (q <-> q')" ) );

    auto small = run( sc, { true } );
    const auto& reduced = small.steps.at( 1 ).current;
    EXPECT_EQ( reduced.structure().law(), fn( reduced, "p <-> q" ) );
    EXPECT_TRUE( reduced.structure().observation( "a" ).is_true() );
    EXPECT_EQ( small.steps.at( 1 ).removed, std::vector< std::string >{ "p@o" } );
    EXPECT_TRUE( small.ok() );
    EXPECT_TRUE( raw.ok() );
}

TEST( Scenario, SallyAnneSteps )
{
    auto r = run( load_scenario( path( "sally_anne.del" ) ), { true } );
    ASSERT_EQ( r.steps.size(), 5u );
    EXPECT_EQ( r.steps[ 1 ].current.state(), ( valuation{ "p", "t" } ) );
    EXPECT_EQ( r.steps[ 2 ].current.state(), valuation{ "t" } );
    EXPECT_EQ( r.steps[ 3 ].current.state(), valuation{ "q" } );
    EXPECT_EQ( r.steps[ 4 ].current.state(), ( valuation{ "p", "q" } ) );
    EXPECT_EQ( r.steps[ 2 ].current.structure().law(), fn( r.steps[ 2 ].current, "t & ~p" ) );
    EXPECT_EQ( r.steps[ 4 ].current.structure().law(), fn( r.steps[ 4 ].current, "(t <-> ~q) & p" ) );
    EXPECT_EQ( r.steps[ 4 ].current.structure().observation( "Sally" ), fn( r.steps[ 4 ].current, "~q'" ) );
    ASSERT_EQ( r.queries.size(), 2u );
    EXPECT_TRUE( r.queries[ 0 ].value );
    EXPECT_FALSE( r.queries[ 1 ].value );
    EXPECT_TRUE( r.ok() );
}

TEST( Scenario, TraceIsStable )
{
    auto sc = load_scenario( path( "sally_anne.del" ) );
    EXPECT_EQ( format_run( run( sc, { true } ), true ), format_run( run( sc, { true } ), true ) );
    EXPECT_EQ( run_json( run( sc ) ).dump(), run_json( run( sc ) ).dump() );
}

TEST( Scenario, EmptyStepsEchoTheInitialScene )
{
    auto r = run( parse_scenario( "AGENTS a\nVARS p q\nLAW p | q\nOBS a: p <-> p'\nSTATE q\nCHECK [a] ~p EXPECT true\n" ) );
    ASSERT_EQ( r.steps.size(), 1u );
    EXPECT_EQ( r.steps[ 0 ].current.state(), valuation{ "q" } );
    ASSERT_EQ( r.queries.size(), 1u );
    EXPECT_TRUE( r.queries[ 0 ].value );
    auto text = format_run( r );
    EXPECT_NE( text.find( "state: {q}" ), std::string::npos );
}

TEST( Scenario, ActionStepsRunThroughTheirTransformer )
{
    auto r = run( load_scenario( path( "flip.del" ) ), { true } );
    EXPECT_TRUE( r.ok() );
    EXPECT_EQ( r.steps.back().current.structure().names(), ( std::vector< std::string >{ "p", "q1" } ) );
}

TEST( Scenario, WriteParseRoundTrip )
{
    for ( const auto* name : { "coin.del", "sally_anne.del", "public_change.del", "flip.del" } )
    {
        auto sc = load_scenario( path( name ) );
        auto text = write_scenario( sc );
        EXPECT_EQ( write_scenario( parse_scenario( text ) ), text ) << name;
        EXPECT_EQ( format_run( run( parse_scenario( text ), { true } ) ), format_run( run( sc, { true } ) ) ) << name;
    }
}

TEST( Scenario, TranslationKeepsQueryResults )
{
    for ( const auto* name : { "coin.del", "sally_anne.del", "public_change.del" } )
    {
        auto sc = load_scenario( path( name ) );
        auto as_action = translate( sc, translate_target::action );
        auto back = translate( as_action, translate_target::transformer );
        auto expected = run( sc );
        for ( const auto& other : { run( as_action, { true } ), run( back, { true } ) } )
        {
            ASSERT_EQ( other.queries.size(), expected.queries.size() );
            for ( std::size_t k = 0; k < expected.queries.size(); ++k )
                EXPECT_EQ( other.queries[ k ].value, expected.queries[ k ].value ) << name;
        }
    }
    EXPECT_THROW( (void)translate( load_scenario( path( "flip.del" ) ), translate_target::action ), scenario_error );
}

TEST( Scenario, ErrorsNameTheLine )
{
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nLAW p &\n" ), 3u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nLAW q\n" ), 3u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nOBS b: Top\n" ), 3u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nSTATE q\n" ), 3u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nLAW p\nSTATE\n" ), 4u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nEVENT e\nADDVARS p\n" ), 4u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nEVENT e\nCHANGE p := [a] p\n" ), 4u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nEVENT e\nADDVARS x\nOBS+ a: p'\n" ), 5u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nEVENT e\nASSIGN x\n" ), 4u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nEVENT e\nPRE p\nVARS q\n" ), 5u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nCHECK after 2 p\n" ), 3u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nEVENT e\nADDVARS x\nCHECK after 0 x\n" ), 5u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nACTION act\nEVENTS e\nREL a: e>f\n" ), 5u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nACTION act\nEVENTS e\n" ), 3u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nFOO\n" ), 3u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nSTATE p\nEVENT e\nPRE ~p\n" ), 4u );
    EXPECT_EQ( error_line( "AGENTS a\nVARS p\nSTATE p\n\nEVENT e\nPRE ~p # comment\n" ), 5u );
}

TEST( Scenario, DefaultsAndListSyntax )
{
    auto sc = parse_scenario( "AGENTS a, b\nVARS {p,q}\nSTATE {p}\nACTION skip\nEVENTS e\nDESIGNATED e\n"
                              "CHECK [a] (p | ~p)\n" );
    EXPECT_EQ( sc.law, formula::top() );
    EXPECT_EQ( sc.state, valuation{ "p" } );
    const auto& a = std::get< action_step >( sc.steps[ 0 ] );
    EXPECT_EQ( a.model.successors( "b", 0 ), std::vector< std::size_t >{ 0 } );
    EXPECT_EQ( a.model.pre( 0 ), formula::top() );
    EXPECT_EQ( sc.queries[ 0 ].after, 1u );
    EXPECT_FALSE( sc.queries[ 0 ].expect );
    auto r = run( sc );
    EXPECT_TRUE( r.ok() );
}

TEST( Scenario, FailedExpectationMakesTheRunFail )
{
    auto r = run( parse_scenario( "AGENTS a\nVARS p\nLAW p\nSTATE p\nCHECK p EXPECT false\n" ) );
    EXPECT_FALSE( r.ok() );
    EXPECT_NE( format_run( r ).find( "1 of 1 checks failed" ), std::string::npos );
    EXPECT_FALSE( run_json( r )[ "ok" ].get< bool >() );
}
