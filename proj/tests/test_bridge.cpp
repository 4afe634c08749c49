#include <symdel/properties.hpp>

#include <gtest/gtest.h>

using namespace symdel;

namespace
{

// Boolean equivalence of two formulas over the given atoms.
bool equivalent( const formula& f, const formula& g, std::initializer_list< const char* > atoms )
{
    bdd_manager mgr;
    std::vector< var_id > vars;
    for ( const auto* a : atoms )
        vars.push_back( mgr.declare( a ) );
    auto env = make_environment( mgr, vars, true );
    return compile( mgr, f, env ) == compile( mgr, g, env );
}

event coin_event()
{
    transformer x;
    x.added = { "q" };
    x.changes.push_back( { "p", parse( "q" ) } );
    x.observations.emplace( "b", parse( "q <-> q'" ) );
    return { x, { "q" } };
}

action_model flip()
{
    action_model a( { "a", "b" } );
    auto tails = a.add_event( "tails", formula::top(), { { "p", formula::bot() } } );
    auto heads = a.add_event( "heads", formula::top(), { { "p", formula::top() } } );
    for ( auto e : { tails, heads } )
    {
        for ( auto f : { tails, heads } )
            a.add_edge( "a", e, f );
        a.add_edge( "b", e, e );
    }
    return a;
}

} // namespace

TEST( Bridge, ActOfTheCoinToss )
{
    auto a = act( coin_event(), { "a", "b" } );
    const auto& m = a.model;
    ASSERT_EQ( m.size(), 2u );
    EXPECT_EQ( m.name( 0 ), "{}" );
    EXPECT_EQ( m.name( 1 ), "{q}" );
    EXPECT_EQ( a.designated, 1u );
    EXPECT_EQ( m.pre( 0 ), formula::top() );
    EXPECT_EQ( m.pre( 1 ), formula::top() );
    EXPECT_EQ( m.post( 0, "p" ), formula::bot() );
    EXPECT_EQ( m.post( 1, "p" ), formula::top() );
    EXPECT_EQ( m.successors( "a", 0 ), ( std::vector< std::size_t >{ 0, 1 } ) );
    EXPECT_EQ( m.successors( "b", 0 ), std::vector< std::size_t >{ 0 } );
    EXPECT_EQ( m.successors( "b", 1 ), std::vector< std::size_t >{ 1 } );
    EXPECT_THROW( (void)act( coin_event(), { "a" } ), unknown_symbol_error );
}

TEST( Bridge, LabelsAreBinaryCounts )
{
    auto lab = label_events( 3, { "q1" } );
    EXPECT_EQ( lab.props, ( std::vector< std::string >{ "q2", "q3" } ) );
    EXPECT_EQ( lab.labels, ( std::vector< valuation >{ {}, { "q2" }, { "q3" } } ) );
    EXPECT_TRUE( label_events( 1, {} ).props.empty() );
    EXPECT_EQ( label_events( 5, {} ).props.size(), 3u );
}

TEST( Bridge, TrfOfTheFlipIsOneBit )
{
    auto l = trf( flip(), 1 );
    const auto& x = l.ev.trf;
    EXPECT_EQ( x.added, std::vector< std::string >{ "q1" } );
    EXPECT_EQ( l.ev.actual, valuation{ "q1" } );
    EXPECT_TRUE( equivalent( x.event_law, parse( "Top" ), { "p", "q1" } ) );
    ASSERT_EQ( x.changes.size(), 1u );
    EXPECT_EQ( x.changes[ 0 ].prop, "p" );
    EXPECT_TRUE( equivalent( x.changes[ 0 ].law, parse( "q1" ), { "p", "q1" } ) );
    EXPECT_TRUE( equivalent( x.observations.at( "a" ), parse( "Top" ), { "q1" } ) );
    EXPECT_TRUE( equivalent( x.observations.at( "b" ), parse( "q1 <-> q1'" ), { "q1" } ) );
}

TEST( Bridge, TrfOfASkipHasNoEventPropositions )
{
    action_model skip( { "a" } );
    auto e = skip.add_event( "skip", formula::top() );
    skip.add_edge( "a", e, e );
    auto l = trf( skip, e );
    EXPECT_TRUE( l.ev.trf.added.empty() );
    EXPECT_TRUE( l.ev.trf.changes.empty() );
    EXPECT_EQ( l.ev.trf.event_law, formula::top() );
    EXPECT_EQ( l.ev.trf.observations.at( "a" ), formula::top() );
}

TEST( Bridge, TrfModifiesOnSyntacticChange )
{
    action_model a( { "a" } );
    auto e = a.add_event( "e", formula::top(), { { "p", parse( "p" ) }, { "q", parse( "q & q" ) } } );
    a.add_edge( "a", e, e );
    auto l = trf( a, e );
    ASSERT_EQ( l.ev.trf.changes.size(), 1u );
    EXPECT_EQ( l.ev.trf.changes[ 0 ].prop, "q" );
}

TEST( Bridge, TrfLabelsAvoidTheActionsAtoms )
{
    action_model a( { "a" } );
    auto e = a.add_event( "e", parse( "q1" ) );
    auto f = a.add_event( "f", parse( "~q1" ) );
    a.add_edge( "a", e, f );
    auto l = trf( a, e, { "q2" } );
    EXPECT_EQ( l.labeling.props, std::vector< std::string >{ "q3" } );
}

TEST( Bridge, StructureOfModel )
{
    kripke_model m( { "p" }, { "a" } );
    auto u = m.add_world( "u", { "p" } );
    auto v = m.add_world( "v", {} );
    m.add_edge( "a", u, v );
    bdd_manager mgr;
    auto plain = structure_of_model( mgr, m );
    EXPECT_EQ( plain.structure.names(), std::vector< std::string >{ "p" } );
    EXPECT_TRUE( plain.structure.law().is_true() );

    kripke_model twins( { "p" }, { "a" } );
    auto x = twins.add_world( "x", { "p" } );
    auto y = twins.add_world( "y", { "p" } );
    auto z = twins.add_world( "z", {} );
    twins.add_edge( "a", x, y );
    twins.add_edge( "a", y, z );
    bdd_manager mgr2;
    auto labeled = structure_of_model( mgr2, twins );
    EXPECT_EQ( labeled.structure.names(), ( std::vector< std::string >{ "p", "d1", "d2" } ) );
    EXPECT_EQ( labeled.labels, ( std::vector< valuation >{ { "p" }, { "p", "d1" }, { "d2" } } ) );
    EXPECT_TRUE( check_morphism( labeled.structure, twins, { "p" }, labeled.labels ).ok );

    auto sc = scene_of_model( mgr2, { twins, y } );
    EXPECT_TRUE( scene_eval( sc, parse( "[a] ~p" ) ) );
    EXPECT_FALSE( scene_eval( { labeled.structure, labeled.labels[ x ] }, parse( "[a] ~p" ) ) );
}

TEST( Bridge, MorphismCheckFindsViolations )
{
    kripke_model m( { "p" }, { "a" } );
    auto u = m.add_world( "u", { "p" } );
    auto v = m.add_world( "v", {} );
    m.add_edge( "a", u, v );
    bdd_manager mgr;
    auto ms = structure_of_model( mgr, m );
    EXPECT_TRUE( check_morphism( ms.structure, m, { "p" }, ms.labels ).ok );

    auto swapped = std::vector< valuation >{ ms.labels[ 1 ], ms.labels[ 0 ] };
    auto r = check_morphism( ms.structure, m, { "p" }, swapped );
    EXPECT_FALSE( r.ok );
    EXPECT_NE( r.violation.find( "C1" ), std::string::npos );

    auto one = std::vector< valuation >{ ms.labels[ 0 ], ms.labels[ 0 ] };
    EXPECT_FALSE( check_morphism( ms.structure, m, { "p" }, one ).ok );
}

TEST( Bridge, ModelToStructureAndBack )
{
    kripke_model m( { "p", "q" }, { "a", "b" } );
    auto u = m.add_world( "u", { "p" } );
    auto v = m.add_world( "v", { "q" } );
    auto w = m.add_world( "w", { "p" } );
    m.add_edge( "a", u, v );
    m.add_edge( "a", v, w );
    m.add_edge( "b", w, u );
    bdd_manager mgr;
    auto ms = structure_of_model( mgr, m );
    auto back = model_of_structure( ms.structure );
    ASSERT_EQ( back.model.size(), m.size() );
    std::vector< std::string > names{ "p", "q" };
    for ( const auto& phi : formula_family( names, m.agents(), 2 ) )
        for ( world_index k = 0; k < m.size(); ++k )
            ASSERT_EQ( eval( m, k, phi ), eval( back.model, *back.world_of( ms.labels[ k ] ), phi ) ) << to_string( phi );
}

TEST( Bridge, SemanticOracleOnTheCoin )
{
    bdd_manager mgr;
    auto f = belief_structure::from_formulas( mgr, { "a", "b" }, std::vector< std::string >{ "p", "q" },
                                              parse( "p <-> q" ), { { "b", parse( "q <-> q'" ) } } );
    semantic_oracle oracle( f );
    EXPECT_EQ( oracle.states(), ( std::vector< valuation >{ {}, { "p", "q" } } ) );
    EXPECT_FALSE( oracle.eval( { "p", "q" }, parse( "[a] p" ) ) );
    EXPECT_TRUE( oracle.eval( { "p", "q" }, parse( "[b] p" ) ) );
}

TEST( Bridge, FormulaFamilyShape )
{
    std::vector< std::string > atoms{ "p", "q" };
    std::vector< std::string > agents{ "a" };
    auto d0 = formula_family( atoms, agents, 0 );
    auto d2 = formula_family( atoms, agents, 2 );
    EXPECT_GT( d2.size(), d0.size() );
    std::size_t deepest = 0;
    for ( const auto& f : d2 )
        deepest = std::max( deepest, modal_depth( f ) );
    EXPECT_EQ( deepest, 2u );
    for ( const auto& f : d0 )
        EXPECT_TRUE( is_boolean( f ) );
}

TEST( Bridge, EventToActionAgrees )
{
    for ( std::uint64_t seed = 1; seed <= 40; ++seed )
    {
        auto r = check_act( seed );
        ASSERT_TRUE( r.truth.ok ) << r.truth.counterexample;
        ASSERT_TRUE( r.morphism.ok ) << r.morphism.counterexample;
    }
}

TEST( Bridge, ActionToEventAgrees )
{
    for ( std::uint64_t seed = 1; seed <= 40; ++seed )
    {
        auto r = check_trf( seed );
        ASSERT_TRUE( r.truth.ok ) << r.truth.counterexample;
        ASSERT_TRUE( r.morphism.ok ) << r.morphism.counterexample;
    }
}

TEST( Bridge, RoundTripAgrees )
{
    for ( std::uint64_t seed = 1; seed <= 40; ++seed )
    {
        auto r = check_round_trip( seed );
        ASSERT_TRUE( r.ok ) << r.counterexample;
    }
}

TEST( Bridge, GeneratorsAreDeterministic )
{
    auto a = generate_scene_event( 42 );
    auto b = generate_scene_event( 42 );
    EXPECT_EQ( a.initial.state(), b.initial.state() );
    EXPECT_EQ( a.initial.structure().names(), b.initial.structure().names() );
    EXPECT_EQ( to_string( a.ev.trf.event_law ), to_string( b.ev.trf.event_law ) );
    EXPECT_EQ( to_string( generate_model_action( 42 ).model.model ), to_string( generate_model_action( 42 ).model.model ) );
}

TEST( Bridge, UncircledObservationsAreCaught )
{
    transform_options broken{ false };
    bool caught = false;
    for ( std::uint64_t seed = 1; seed <= 100 && !caught; ++seed )
    {
        auto r = check_act( seed, 2, broken );
        caught = !r.truth.ok || !r.morphism.ok;
    }
    EXPECT_TRUE( caught );
}
