#include <symdel/properties.hpp>

#include <gtest/gtest.h>

using namespace symdel;

namespace
{

// Compiles text over the whole vocabulary of `f`, primes included.
bool_fn fn( const belief_structure& f, const std::string& text )
{
    return compile( f.engine(), parse( text ), make_environment( f.engine(), f.vocabulary(), true ) );
}

std::vector< std::string > list( std::initializer_list< const char* > xs ) { return { xs.begin(), xs.end() }; }

belief_structure coin_structure( bdd_manager& mgr )
{
    auto vars = list( { "p" } );
    return belief_structure::from_formulas( mgr, list( { "a", "b" } ), vars, parse( "p" ),
                                            { { "a", parse( "p <-> p'" ) }, { "b", parse( "p <-> p'" ) } } );
}

transformer coin_toss()
{
    transformer x;
    x.added = { "q" };
    x.changes.push_back( { "p", parse( "q" ) } );
    x.observations.emplace( "b", parse( "q <-> q'" ) );
    return x;
}

} // namespace

TEST( Symbolic, StructureBasics )
{
    bdd_manager mgr;
    auto f = belief_structure::from_formulas( mgr, list( { "a" } ), list( { "p", "q" } ), parse( "p | q" ) );
    EXPECT_EQ( f.names(), list( { "p", "q" } ) );
    EXPECT_TRUE( f.observation( "a" ).is_true() );
    EXPECT_EQ( states( f ), ( std::vector< valuation >{ { "p" }, { "p", "q" }, { "q" } } ) );
    EXPECT_TRUE( f.is_state( { "q" } ) );
    EXPECT_FALSE( f.is_state( {} ) );
    EXPECT_THROW( scene( f, {} ), error );
    EXPECT_THROW( (void)belief_structure::from_formulas( mgr, list( { "a" } ), list( { "p" } ), parse( "q" ) ), error );
    EXPECT_THROW( (void)belief_structure::from_formulas( mgr, list( { "a" } ), list( { "p" } ), parse( "p" ),
                                                         { { "b", parse( "Top" ) } } ),
                  unknown_symbol_error );
}

TEST( Symbolic, BoxTranslation )
{
    bdd_manager mgr;
    auto f = belief_structure::from_formulas( mgr, list( { "a" } ), list( { "p", "q" } ), parse( "Top" ),
                                              { { "a", parse( "q <-> q'" ) } } );
    // a sees q and nothing else
    EXPECT_EQ( bool_translate( f, parse( "[a] q" ) ), fn( f, "q" ) );
    EXPECT_EQ( bool_translate( f, parse( "[a] p" ) ), fn( f, "Bot" ) );
    EXPECT_EQ( bool_translate( f, parse( "[a] (p -> q)" ) ), fn( f, "q" ) );
    EXPECT_EQ( bool_translate( f, parse( "[a] [a] q" ) ), fn( f, "q" ) );
    EXPECT_TRUE( scene_eval( { f, { "q" } }, parse( "[a] q & ~[a] p" ) ) );
    EXPECT_THROW( (void)bool_translate( f, parse( "r" ) ), unknown_symbol_error );
    EXPECT_THROW( (void)bool_translate( f, parse( "[b] p" ) ), unknown_symbol_error );
}

TEST( Symbolic, CoinTransform )
{
    bdd_manager mgr;
    auto f = coin_structure( mgr );
    auto g = transform( f, coin_toss() );
    EXPECT_EQ( g.names(), list( { "p", "q", "p@o" } ) );
    EXPECT_EQ( g.law(), fn( g, "p@o & (p <-> q)" ) );
    EXPECT_EQ( g.observation( "a" ), fn( g, "p@o <-> p@o'" ) );
    EXPECT_EQ( g.observation( "b" ), fn( g, "(p@o <-> p@o') & (q <-> q')" ) );

    auto small = minimize( g, { "p", "q" } );
    EXPECT_EQ( small.names(), list( { "p", "q" } ) );
    EXPECT_EQ( small.law(), fn( small, "p <-> q" ) );
    EXPECT_TRUE( small.observation( "a" ).is_true() );
    EXPECT_EQ( small.observation( "b" ), fn( small, "q <-> q'" ) );

    // a no longer knows p; b knows p exactly where q holds
    EXPECT_TRUE( bool_translate( small, parse( "[a] p" ) ).is_false() );
    EXPECT_EQ( bool_translate( small, parse( "[b] p" ) ), fn( small, "q" ) );
}

TEST( Symbolic, CoinApplyEvent )
{
    bdd_manager mgr;
    scene start( coin_structure( mgr ), { "p" } );
    auto heads = apply_event( start, { coin_toss(), { "q" } } );
    EXPECT_EQ( heads.state(), ( valuation{ "p", "p@o", "q" } ) );
    // a second transform on the same engine gets its own circled copy
    auto tails = apply_event( start, { coin_toss(), {} } );
    EXPECT_EQ( tails.state(), valuation{ "p@o2" } );
    EXPECT_TRUE( scene_eval( heads, parse( "p & [b] p & ~[a] p & ~[a] ~p" ) ) );
    EXPECT_TRUE( scene_eval( tails, parse( "~p & [b] ~p" ) ) );
}

TEST( Symbolic, PublicChange )
{
    bdd_manager mgr;
    auto f = belief_structure::from_formulas( mgr, list( { "a" } ), list( { "p", "q" } ), parse( "Top" ),
                                              { { "a", parse( "q <-> q'" ) } } );
    transformer x;
    x.changes.push_back( { "p", parse( "q" ) } );
    auto after = apply_event( { f, { "q" } }, { x, {} } );
    EXPECT_EQ( after.state(), ( valuation{ "p", "q" } ) );
    EXPECT_TRUE( scene_eval( after, parse( "[a] (p <-> q) & [a] p" ) ) );
    const auto& g = after.structure();
    EXPECT_EQ( g.law(), fn( g, "p <-> q" ) );
    EXPECT_EQ( g.observation( "a" ), fn( g, "q <-> q'" ) );
}

TEST( Symbolic, SallyAnneThirdStepBeforeMinimization )
{
    bdd_manager mgr;
    auto f = belief_structure::from_formulas( mgr, list( { "S", "A" } ), list( { "p", "t" } ), parse( "t & ~p" ) );
    transformer x;
    x.added = { "q" };
    x.changes.push_back( { "t", parse( "(~q -> t) & (q -> Bot)" ) } );
    x.observations.emplace( "S", parse( "~q'" ) );
    x.observations.emplace( "A", parse( "q <-> q'" ) );
    auto after = apply_event( { f, { "t" } }, { x, { "q" } } );
    const auto& g = after.structure();
    EXPECT_EQ( g.names(), list( { "p", "t", "q", "t@o" } ) );
    EXPECT_EQ( g.law(), fn( g, "t@o & ~p & (t <-> ~q)" ) );
    EXPECT_EQ( after.state(), ( valuation{ "q", "t@o" } ) );
    EXPECT_EQ( g.observation( "S" ), fn( g, "~q'" ) );

    auto small = minimize( after, { "p", "t", "q" } );
    EXPECT_EQ( small.structure().law(), fn( small.structure(), "~p & (t <-> ~q)" ) );
    EXPECT_EQ( small.state(), valuation{ "q" } );
    EXPECT_TRUE( scene_eval( small, parse( "[S] t & ~t" ) ) );
}

TEST( Symbolic, TransformErrors )
{
    bdd_manager mgr;
    scene start( coin_structure( mgr ), { "p" } );
    transformer clash;
    clash.added = { "p" };
    EXPECT_THROW( (void)apply_event( start, { clash, {} } ), error );

    transformer unknown;
    unknown.changes.push_back( { "r", parse( "Top" ) } );
    EXPECT_THROW( (void)apply_event( start, { unknown, {} } ), error );

    transformer impossible;
    impossible.event_law = parse( "~p" );
    EXPECT_THROW( (void)apply_event( start, { impossible, {} } ), not_executable_error );

    transformer stray;
    stray.added = { "x" };
    stray.observations.emplace( "a", parse( "p'" ) );
    EXPECT_THROW( (void)apply_event( start, { stray, {} } ), error );

    transformer boxed;
    boxed.added = { "x" };
    boxed.event_law = parse( "[a] x" );
    EXPECT_THROW( (void)apply_event( start, { boxed, {} } ), error );

    EXPECT_THROW( (void)apply_event( start, { coin_toss(), { "z" } } ), error );
}

TEST( Symbolic, EpistemicEventLaw )
{
    // an announcement that a knows p, over a structure where a sees p
    bdd_manager mgr;
    auto f = belief_structure::from_formulas( mgr, list( { "a", "b" } ), list( { "p", "q" } ), parse( "Top" ),
                                              { { "a", parse( "p <-> p'" ) } } );
    transformer x;
    x.event_law = parse( "[a] p" );
    auto after = apply_event( { f, { "p" } }, { x, {} } );
    EXPECT_EQ( after.structure().law(), fn( after.structure(), "p" ) );
    EXPECT_TRUE( scene_eval( after, parse( "[b] p" ) ) );
}

TEST( Symbolic, Minimization )
{
    bdd_manager mgr;
    auto f = belief_structure::from_formulas( mgr, list( { "a" } ), list( { "p", "d" } ), parse( "d & p | d & ~p" ),
                                              { { "a", parse( "(d' -> p') & (d -> p | ~p)" ) } } );
    auto fixed = determined( f );
    ASSERT_EQ( fixed.size(), 1u );
    EXPECT_EQ( mgr.name( fixed[ 0 ].first ), "d" );
    EXPECT_TRUE( fixed[ 0 ].second );
    auto small = minimize( f, { "p" } );
    EXPECT_EQ( small.names(), list( { "p" } ) );
    EXPECT_EQ( small.observation( "a" ), fn( small, "p'" ) );
    EXPECT_THROW( (void)minimize( f, {} ), not_determined_error );
    try
    {
        (void)minimize( f, {} );
    }
    catch ( const not_determined_error& e )
    {
        EXPECT_EQ( e.variable, "p" );
    }
}

TEST( Symbolic, TranslationMatchesDirectSemantics )
{
    for ( std::uint64_t seed = 1; seed <= 100; ++seed )
    {
        auto r = check_translation( seed );
        ASSERT_TRUE( r.ok ) << r.counterexample;
        EXPECT_GT( r.comparisons, 0u );
    }
}

TEST( Symbolic, MinimizationKeepsTruth )
{
    for ( std::uint64_t seed = 1; seed <= 50; ++seed )
    {
        auto r = check_minimize( seed );
        ASSERT_TRUE( r.ok ) << r.counterexample;
    }
}
