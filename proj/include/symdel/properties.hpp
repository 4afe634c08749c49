#pragma once

#include "generate.hpp"

#include <chrono>
#include <functional>
#include <ostream>

namespace symdel
{

// Scene semantics read off directly: a box quantifies over every subset t of V
// that satisfies the law and is related to s by the observation. Uses only
// pointwise evaluation of the law and observations, never the translation.
class semantic_oracle
{
    const belief_structure& _f;
    std::vector< valuation > _states;

public:
    explicit semantic_oracle( const belief_structure& f ) : _f{ f }
    {
        for ( const auto& t : detail::subsets( f.names() ) )
            if ( f.is_state( t ) )
                _states.push_back( t );
    }

    [[nodiscard]] const std::vector< valuation >& states() const { return _states; }

    [[nodiscard]] bool eval( const valuation& s, const formula& phi ) const
    {
        switch ( phi.kind() )
        {
        case formula_kind::top: return true;
        case formula_kind::bot: return false;
        case formula_kind::atom:
            if ( !_f.find( phi.name() ) )
                throw unknown_symbol_error( "unknown atom '" + phi.name() + "'" );
            return s.contains( phi.name() );
        case formula_kind::negation: return !eval( s, phi.operand() );
        case formula_kind::conjunction:
            return std::ranges::all_of( phi.operands(), [ & ]( const formula& g ) { return eval( s, g ); } );
        case formula_kind::disjunction:
            return std::ranges::any_of( phi.operands(), [ & ]( const formula& g ) { return eval( s, g ); } );
        case formula_kind::implication: return !eval( s, phi.operand( 0 ) ) || eval( s, phi.operand( 1 ) );
        case formula_kind::equivalence: return eval( s, phi.operand( 0 ) ) == eval( s, phi.operand( 1 ) );
        case formula_kind::box: {
            const auto& obs = _f.observation( phi.name() );
            for ( const auto& t : _states )
                if ( _f.holds( obs, s, &t ) && !eval( t, phi.operand() ) )
                    return false;
            return true;
        }
        }
        return false;
    }
};

struct property_result
{
    bool ok = true;
    std::string counterexample;
    std::size_t comparisons = 0;
};

namespace detail
{

inline std::string describe_structure( const belief_structure& f )
{
    auto names = f.names();
    std::string out = "V=" + to_string( valuation( names.begin(), names.end() ) );
    out += " law=" + to_string( describe( f.law() ) );
    for ( const auto& [ agent, o ] : f.observations() )
        out += " obs[" + agent + "]=" + to_string( describe( o ) );
    return out;
}

inline std::string describe_event( const event& ev )
{
    const auto& x = ev.trf;
    std::string out = "V+=" + to_string( valuation( x.added.begin(), x.added.end() ) );
    out += " pre=" + to_string( x.event_law );
    for ( const auto& c : x.changes )
        out += " " + c.prop + ":=" + to_string( c.law );
    for ( const auto& [ agent, o ] : x.observations )
        out += " obs+[" + agent + "]=" + to_string( o );
    out += " x=" + to_string( ev.actual );
    return out;
}

inline std::string describe_model( const kripke_model& m ) { return to_string( m ); }

inline std::string describe_action( const action_model& a )
{
    std::string out;
    for ( std::size_t e = 0; e < a.size(); ++e )
    {
        out += "event " + a.name( e ) + " pre=" + to_string( a.pre( e ) );
        for ( const auto& [ p, f ] : a.changes( e ) )
            out += " " + p + ":=" + to_string( f );
        out += "\n";
    }
    for ( const auto& agent : a.agents() )
    {
        out += "agent " + agent + ":";
        for ( std::size_t e = 0; e < a.size(); ++e )
            for ( auto f : a.successors( agent, e ) )
                out += " " + a.name( e ) + ">" + a.name( f );
        out += "\n";
    }
    return out;
}

// Keeps the smallest failing formula seen so far.
struct smallest_failure
{
    std::optional< formula > phi;
    std::string where;

    void offer( const formula& f, std::string at )
    {
        if ( !phi || to_string( f ).size() < to_string( *phi ).size() )
        {
            phi = f;
            where = std::move( at );
        }
    }
};

} // namespace detail

// Truth is preserved and reflected by the boolean translation: on random
// structures and random formulas, the translation holds at exactly the states
// where the direct semantics says the formula is true.
inline property_result check_translation( std::uint64_t seed, std::size_t depth = 3, std::size_t formulas = 24,
                                          const bounds& b = {} )
{
    random_source rng( seed );
    bdd_manager mgr;
    auto sc = random_scene( rng, mgr, b );
    const auto& f = sc.structure();
    auto names = f.names();
    semantic_oracle oracle( f );

    property_result out;
    detail::smallest_failure worst;
    for ( std::size_t k = 0; k < formulas; ++k )
    {
        auto phi = random_formula( rng, names, f.agents(), 1 + rng.below( depth ), 2 + rng.below( 6 ) );
        auto translated = bool_translate( f, phi );
        for ( const auto& s : oracle.states() )
        {
            ++out.comparisons;
            if ( oracle.eval( s, phi ) != f.holds( translated, s ) )
                worst.offer( phi, to_string( s ) );
        }
    }
    if ( worst.phi )
    {
        out.ok = false;
        out.counterexample = "seed " + std::to_string( seed ) + ": " + detail::describe_structure( f ) + "\n  formula "
                             + to_string( *worst.phi ) + " at state " + worst.where;
    }
    return out;
}

struct act_result
{
    property_result truth;    // symbolic update vs explicit update
    property_result morphism; // the next-state map satisfies C1-C3
};

// Applying an event to a scene agrees with the product update of the
// corresponding Kripke model with the translated action, at every world of
// the product (matched through the next-state map).
inline act_result check_act( std::uint64_t seed, std::size_t depth = 2, transform_options options = {}, const bounds& b = {} )
{
    auto inst = generate_scene_event( seed, b );
    const auto& f = inst.initial.structure();
    auto names = f.names();

    auto traced = transform_traced( f, inst.ev.trf, options );
    const auto& g_structure = traced.structure;

    auto explicit_model = model_of_structure( f );
    auto action = act( inst.ev, f.agents() );
    auto prod = product_update_traced( explicit_model.model, action.model );

    auto events = detail::subsets( inst.ev.trf.added );
    std::vector< valuation > g;
    for ( auto [ w, e ] : prod.origin )
        g.push_back( next_state( explicit_model.states[ w ], { inst.ev.trf, events[ e ] }, traced.circled ) );

    act_result out;
    auto context = [ & ] {
        return "seed " + std::to_string( seed ) + ": " + detail::describe_structure( f ) + " state "
               + to_string( inst.initial.state() ) + "\n  event " + detail::describe_event( inst.ev );
    };

    auto report = check_morphism( g_structure, prod.model, { names.begin(), names.end() }, g );
    out.morphism.comparisons = 1;
    if ( !report.ok )
    {
        out.morphism.ok = false;
        out.morphism.counterexample = context() + "\n  " + report.violation;
    }

    // the designated pair must survive exactly when the event is executable
    auto point_world = explicit_model.world_of( inst.initial.state() );
    auto point = prod.find( *point_world, static_cast< std::size_t >( std::ranges::find( events, inst.ev.actual ) - events.begin() ) );
    bool executable = true;
    try
    {
        (void)apply_event( inst.initial, inst.ev, options );
    }
    catch ( const not_executable_error& )
    {
        executable = false;
    }
    if ( executable != point.has_value() )
    {
        out.truth.ok = false;
        out.truth.counterexample = context() + "\n  executability differs";
        return out;
    }

    detail::smallest_failure worst;
    for ( const auto& phi : formula_family( names, f.agents(), depth ) )
    {
        auto sym = bool_translate( g_structure, phi );
        auto truth = truth_set( prod.model, phi );
        for ( world_index w = 0; w < prod.model.size(); ++w )
        {
            ++out.truth.comparisons;
            if ( g_structure.holds( sym, g[ w ] ) != truth[ w ] )
                worst.offer( phi, prod.model.name( w ) );
        }
    }
    if ( worst.phi )
    {
        out.truth.ok = false;
        out.truth.counterexample = context() + "\n  formula " + to_string( *worst.phi ) + " at " + worst.where;
    }
    return out;
}

// The product update of a pointed model agrees with applying the translated
// transformer to the translated structure, at every world of the product.
inline act_result check_trf( std::uint64_t seed, std::size_t depth = 2, const bounds& b = {} )
{
    auto inst = generate_model_action( seed, b );
    const auto& m = inst.model.model;
    const auto& a = inst.action.model;
    std::vector< std::string > names( m.vocabulary().begin(), m.vocabulary().end() );

    bdd_manager mgr;
    auto fm = structure_of_model( mgr, m );
    auto reserved_names = fm.structure.names();
    auto lab = trf( a, inst.action.designated, { reserved_names.begin(), reserved_names.end() } );
    auto traced = transform_traced( fm.structure, lab.ev.trf );
    auto prod = product_update_traced( m, a );

    std::vector< valuation > g;
    for ( auto [ w, e ] : prod.origin )
        g.push_back( next_state( fm.labels[ w ], { lab.ev.trf, lab.labeling.labels[ e ] }, traced.circled ) );

    act_result out;
    auto context = [ & ] {
        return "seed " + std::to_string( seed ) + ":\n" + detail::describe_model( m ) + "point "
               + m.name( inst.model.point ) + "\n" + detail::describe_action( a ) + "designated "
               + a.name( inst.action.designated );
    };

    auto report = check_morphism( traced.structure, prod.model, { names.begin(), names.end() }, g );
    out.morphism.comparisons = 1;
    if ( !report.ok )
    {
        out.morphism.ok = false;
        out.morphism.counterexample = context() + "\n  " + report.violation;
    }

    // the designated pair is executable on both sides
    auto explicit_point = product_update( inst.model, a, inst.action.designated );
    auto symbolic = apply_event( { fm.structure, fm.labels[ inst.model.point ] }, lab.ev );

    detail::smallest_failure worst;
    for ( const auto& phi : formula_family( names, m.agents(), depth ) )
    {
        auto sym = bool_translate( traced.structure, phi );
        auto truth = truth_set( prod.model, phi );
        for ( world_index w = 0; w < prod.model.size(); ++w )
        {
            ++out.truth.comparisons;
            if ( traced.structure.holds( sym, g[ w ] ) != truth[ w ] )
                worst.offer( phi, prod.model.name( w ) );
        }
        ++out.truth.comparisons;
        if ( scene_eval( symbolic, phi ) != eval_pointed( explicit_point, phi ) )
            worst.offer( phi, "the designated pair" );
    }
    if ( worst.phi )
    {
        out.truth.ok = false;
        out.truth.counterexample = context() + "\n  formula " + to_string( *worst.phi ) + " at " + worst.where;
    }
    return out;
}

// Removing a proposition fixed by the law does not change the truth of any
// formula over the remaining vocabulary.
inline property_result check_minimize( std::uint64_t seed, std::size_t depth = 2, const bounds& b = {} )
{
    random_source rng( seed );
    bdd_manager mgr;
    auto base = random_scene( rng, mgr, b );
    const auto& f0 = base.structure();
    auto names = f0.names();

    // extend with a proposition the law fixes, mentioned by the observations
    auto d = mgr.declare( "d" );
    bool value = rng.chance( 1, 2 );
    auto vars = f0.vocabulary();
    vars.push_back( d );
    std::vector< var_id > both = vars;
    for ( auto v : vars )
        both.push_back( mgr.primed( v ) );
    std::map< std::string, bool_fn, std::less<> > obs;
    for ( const auto& agent : f0.agents() )
        obs.emplace( agent, from_table( mgr, both, rng.table( both.size(), 1 + rng.below( 3 ), 4 ) ) );
    belief_structure f( mgr, f0.agents(), vars, f0.law() & mgr.literal( d, value ), std::move( obs ) );
    auto small = minimize( f, { names.begin(), names.end() } );

    property_result out;
    detail::smallest_failure worst;
    auto family = formula_family( names, f.agents(), depth );
    auto all = states( f );
    for ( const auto& phi : family )
    {
        auto big = bool_translate( f, phi );
        auto reduced_fn = bool_translate( small, phi );
        for ( const auto& s : all )
        {
            valuation reduced = s;
            reduced.erase( "d" );
            ++out.comparisons;
            if ( f.holds( big, s ) != small.holds( reduced_fn, reduced ) )
                worst.offer( phi, to_string( s ) );
        }
    }
    if ( worst.phi )
    {
        out.ok = false;
        out.counterexample = "seed " + std::to_string( seed ) + ": " + detail::describe_structure( f ) + "\n  formula "
                             + to_string( *worst.phi ) + " at state " + worst.where;
    }
    return out;
}

// act(trf(A)) updates every generated model like A does, at the designated pair.
inline property_result check_round_trip( std::uint64_t seed, std::size_t depth = 2, const bounds& b = {} )
{
    auto inst = generate_model_action( seed, b );
    const auto& m = inst.model.model;
    std::vector< std::string > names( m.vocabulary().begin(), m.vocabulary().end() );
    auto lab = trf( inst.action.model, inst.action.designated, { names.begin(), names.end() } );
    auto back = act( lab.ev, m.agents() );

    auto expected = product_update( inst.model, inst.action.model, inst.action.designated );
    auto actual = product_update( inst.model, back.model, back.designated );

    property_result out;
    detail::smallest_failure worst;
    for ( const auto& phi : formula_family( names, m.agents(), depth ) )
    {
        ++out.comparisons;
        if ( eval_pointed( expected, phi ) != eval_pointed( actual, phi ) )
            worst.offer( phi, "the designated pair" );
    }
    if ( worst.phi )
    {
        out.ok = false;
        out.counterexample = "seed " + std::to_string( seed ) + ": formula " + to_string( *worst.phi );
    }
    return out;
}

struct suite_line
{
    std::string name;
    std::size_t instances = 0;
    std::size_t comparisons = 0;
    std::size_t failures = 0;
    std::string first_counterexample;
    double seconds = 0;

    [[nodiscard]] bool ok() const { return failures == 0; }
};

struct suite_options
{
    std::uint64_t seed = 1;
    std::size_t count = 500;
    std::size_t depth = 2;
    bounds limits;
    transform_options transform;
};

namespace detail
{

inline void record( suite_line& line, const property_result& r )
{
    ++line.instances;
    line.comparisons += r.comparisons;
    if ( !r.ok )
    {
        if ( line.failures == 0 )
            line.first_counterexample = r.counterexample;
        ++line.failures;
    }
}

template < typename Fn >
suite_line timed( std::string name, Fn&& body )
{
    suite_line line{ std::move( name ) };
    auto start = std::chrono::steady_clock::now();
    body( line );
    line.seconds = std::chrono::duration< double >( std::chrono::steady_clock::now() - start ).count();
    return line;
}

} // namespace detail

// All property suites over `count` consecutive seeds.
inline std::vector< suite_line > run_suite( const suite_options& opt )
{
    std::vector< suite_line > lines;
    lines.push_back( detail::timed( "translation", [ & ]( suite_line& line ) {
        for ( std::size_t k = 0; k < opt.count; ++k )
            detail::record( line, check_translation( opt.seed + k, opt.depth + 1, 24, opt.limits ) );
    } ) );

    suite_line morphism{ "morphism" };
    lines.push_back( detail::timed( "event-to-action", [ & ]( suite_line& line ) {
        for ( std::size_t k = 0; k < opt.count; ++k )
        {
            auto r = check_act( opt.seed + k, opt.depth, opt.transform, opt.limits );
            detail::record( line, r.truth );
            detail::record( morphism, r.morphism );
        }
    } ) );
    morphism.seconds = lines.back().seconds;
    lines.push_back( morphism );

    lines.push_back( detail::timed( "action-to-event", [ & ]( suite_line& line ) {
        for ( std::size_t k = 0; k < opt.count; ++k )
            detail::record( line, check_trf( opt.seed + k, opt.depth, opt.limits ).truth );
    } ) );
    lines.push_back( detail::timed( "minimization", [ & ]( suite_line& line ) {
        for ( std::size_t k = 0; k < opt.count; ++k )
            detail::record( line, check_minimize( opt.seed + k, opt.depth, opt.limits ) );
    } ) );
    lines.push_back( detail::timed( "round-trip", [ & ]( suite_line& line ) {
        for ( std::size_t k = 0; k < opt.count; ++k )
            detail::record( line, check_round_trip( opt.seed + k, opt.depth, opt.limits ) );
    } ) );
    return lines;
}

} // namespace symdel
