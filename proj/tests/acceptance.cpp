// Acceptance gate: one PASS/FAIL line per criterion.
#include <symdel/properties.hpp>
#include <symdel/scenario.hpp>

#include <chrono>
#include <cstdio>
#include <functional>

using namespace symdel;

namespace
{

struct outcome
{
    bool ok = true;
    std::string detail;
};

bool_fn fn( const belief_structure& f, const std::string& text )
{
    return compile( f.engine(), parse( text ), make_environment( f.engine(), f.vocabulary(), true ) );
}

void require( outcome& o, bool condition, const std::string& what )
{
    if ( !condition && o.ok )
    {
        o.ok = false;
        o.detail = what;
    }
}

outcome sally_anne()
{
    outcome o;
    auto r = run( load_scenario( std::string( SCENARIO_DIR ) + "/sally_anne.del" ), { true } );
    if ( r.steps.size() != 5 )
        return { false, "expected four steps" };
    const char* laws[] = { "t & p", "t & ~p", "~p & (t <-> ~q)", "(t <-> ~q) & p" };
    const valuation states[] = { { "p", "t" }, { "t" }, { "q" }, { "p", "q" } };
    for ( std::size_t k = 1; k <= 4; ++k )
    {
        const auto& sc = r.steps[ k ].current;
        const auto& f = sc.structure();
        auto step = "step " + std::to_string( k );
        require( o, f.law() == fn( f, laws[ k - 1 ] ), step + " law" );
        require( o, sc.state() == states[ k - 1 ], step + " state" );
        auto sally = k >= 3 ? "~q'" : "Top";
        auto anne = k >= 3 ? "q <-> q'" : "Top";
        require( o, f.observation( "Sally" ) == fn( f, sally ), step + " Sally's observation" );
        require( o, f.observation( "Anne" ) == fn( f, anne ), step + " Anne's observation" );
    }
    const auto& last = r.steps[ 4 ].current;
    require( o, scene_eval( last, parse( "[Sally] t" ) ), "[Sally] t" );
    require( o, !scene_eval( last, parse( "t" ) ), "t" );
    require( o, bool_translate( last.structure(), parse( "[Sally] t" ) ).is_true(), "[Sally] t translates to Top" );
    require( o, r.ok(), "scenario checks" );
    return o;
}

outcome coin()
{
    outcome o;
    bdd_manager mgr;
    auto f = belief_structure::from_formulas( mgr, { "a", "b" }, std::vector< std::string >{ "p" }, parse( "p" ),
                                              { { "a", parse( "p <-> p'" ) }, { "b", parse( "p <-> p'" ) } } );
    transformer x;
    x.added = { "q" };
    x.changes.push_back( { "p", parse( "q" ) } );
    x.observations.emplace( "a", formula::top() );
    x.observations.emplace( "b", parse( "q <-> q'" ) );
    auto g = transform( f, x );
    require( o, g.names() == std::vector< std::string >{ "p", "q", "p@o" }, "vocabulary" );
    require( o, g.law() == fn( g, "p@o & (p <-> q)" ), "law" );
    require( o, g.observation( "a" ) == fn( g, "p@o <-> p@o'" ), "observation of a" );
    require( o, g.observation( "b" ) == fn( g, "(p@o <-> p@o') & (q <-> q')" ), "observation of b" );
    auto h = minimize( g, { "p", "q" } );
    require( o, h.law() == fn( h, "p <-> q" ), "minimized law" );
    require( o, h.observation( "a" ).is_true(), "minimized observation of a" );
    require( o, h.observation( "b" ) == fn( h, "q <-> q'" ), "minimized observation of b" );
    return o;
}

outcome suite( const std::function< property_result( std::uint64_t ) >& check, std::uint64_t count )
{
    outcome o;
    std::size_t failures = 0;
    for ( std::uint64_t seed = 1; seed <= count; ++seed )
    {
        auto r = check( seed );
        if ( !r.ok )
        {
            if ( failures++ == 0 )
                o.detail = r.counterexample;
            o.ok = false;
        }
    }
    if ( failures )
        o.detail = std::to_string( failures ) + " of " + std::to_string( count ) + " failed; first: " + o.detail;
    else
        o.detail = std::to_string( count ) + " instances";
    return o;
}

int report( int number, const std::string& title, double limit_seconds, const std::function< outcome() >& body )
{
    auto start = std::chrono::steady_clock::now();
    outcome o;
    try
    {
        o = body();
    }
    catch ( const std::exception& e )
    {
        o = { false, std::string( "exception: " ) + e.what() };
    }
    double seconds = std::chrono::duration< double >( std::chrono::steady_clock::now() - start ).count();
    bool in_time = limit_seconds <= 0 || seconds < limit_seconds;
    bool pass = o.ok && in_time;
    std::printf( "criterion %d %s: %s (%.2fs%s)%s%s\n", number, title.c_str(), pass ? "PASS" : "FAIL", seconds,
                 in_time ? "" : ", over the time limit", o.detail.empty() ? "" : " ", o.detail.c_str() );
    return pass ? 0 : 1;
}

} // namespace

int main()
{
    int failed = 0;
    failed += report( 1, "Sally-Anne end to end", 1.0, sally_anne );
    failed += report( 2, "coin transform and minimization", 1.0, coin );
    failed += report( 3, "translation preserves and reflects truth", 60.0, [] {
        return suite( []( std::uint64_t seed ) { return check_translation( seed, 3 ); }, 1000 );
    } );

    // criteria 4 and 7 share the same instances
    std::vector< act_result > part_one;
    failed += report( 4, "symbolic update equals explicit update", 120.0, [ & ] {
        return suite(
            [ & ]( std::uint64_t seed ) {
                part_one.push_back( check_act( seed, 2 ) );
                return part_one.back().truth;
            },
            500 );
    } );
    failed += report( 5, "explicit update equals translated symbolic update", 120.0, [] {
        return suite( []( std::uint64_t seed ) { return check_trf( seed, 2 ).truth; }, 500 );
    } );
    failed += report( 6, "minimization keeps truth", 60.0, [] {
        return suite( []( std::uint64_t seed ) { return check_minimize( seed, 2 ); }, 500 );
    } );
    failed += report( 7, "next-state map is a morphism", 0, [ & ] {
        return suite( [ & ]( std::uint64_t seed ) { return part_one.at( seed - 1 ).morphism; }, 500 );
    } );
    std::printf( "%s\n", failed ? "acceptance: FAIL" : "acceptance: PASS" );
    return failed ? 1 : 0;
}
