#pragma once

#include "boolfun.hpp"
#include "compile.hpp"
#include "formula.hpp"
#include "syntax.hpp"

namespace symdel
{

// A belief structure (V, law, obs): the states are the subsets of V satisfying
// the law, and obs[i] relates a state s to t iff s together with the primed
// copy of t satisfies it.
class belief_structure
{
    bdd_manager* _mgr;
    std::vector< std::string > _agents;
    std::vector< var_id > _vocabulary;
    bool_fn _law;
    std::map< std::string, bool_fn, std::less<> > _obs;

    std::map< var_id, var_id > _to_primed;
    std::vector< var_id > _primed_vocabulary;
    bool_fn _primed_law;

public:
    belief_structure( bdd_manager& mgr, std::vector< std::string > agents, std::vector< var_id > vocabulary, bool_fn law,
                      std::map< std::string, bool_fn, std::less<> > observations = {} )
            : _mgr{ &mgr }, _agents{ std::move( agents ) }, _vocabulary{ std::move( vocabulary ) }, _law{ law },
              _obs{ std::move( observations ) }
    {
        std::set< var_id > base( _vocabulary.begin(), _vocabulary.end() );
        if ( base.size() != _vocabulary.size() )
            throw error( "duplicate proposition in vocabulary" );
        for ( auto v : _vocabulary )
        {
            if ( mgr.kind( v ) != var_kind::base )
                throw error( "vocabulary must consist of unprimed propositions" );
            _to_primed.emplace( v, mgr.primed( v ) );
            _primed_vocabulary.push_back( mgr.primed( v ) );
        }
        for ( auto v : mgr.support( _law ) )
            if ( !base.contains( v ) )
                throw error( "state law mentions '" + mgr.name( v ) + "' outside the vocabulary" );
        for ( const auto& [ agent, o ] : _obs )
        {
            if ( std::ranges::find( _agents, agent ) == _agents.end() )
                throw unknown_symbol_error( "observation for unknown agent '" + agent + "'" );
            for ( auto v : mgr.support( o ) )
                if ( !base.contains( mgr.unprimed( v ) ) )
                    throw error( "observation of " + agent + " mentions '" + mgr.name( v ) + "' outside the vocabulary" );
        }
        for ( const auto& a : _agents )
            if ( !_obs.contains( a ) )
                _obs.emplace( a, mgr.constant( true ) );
        _primed_law = mgr.rename( _law, _to_primed );
    }

    // Law over V; observations over V and primed V (written p').
    static belief_structure from_formulas( bdd_manager& mgr, std::vector< std::string > agents,
                                           std::span< const std::string > vocabulary, const formula& law,
                                           const std::map< std::string, formula >& observations = {} )
    {
        std::vector< var_id > vars;
        for ( const auto& p : vocabulary )
            vars.push_back( mgr.declare( p ) );
        auto env = make_environment( mgr, vars );
        auto env2 = make_environment( mgr, vars, true );
        std::map< std::string, bool_fn, std::less<> > obs;
        for ( const auto& [ agent, f ] : observations )
            obs.emplace( agent, compile( mgr, f, env2 ) );
        return { mgr, std::move( agents ), std::move( vars ), compile( mgr, law, env ), std::move( obs ) };
    }

    [[nodiscard]] bdd_manager& engine() const { return *_mgr; }
    [[nodiscard]] const std::vector< std::string >& agents() const { return _agents; }
    [[nodiscard]] const std::vector< var_id >& vocabulary() const { return _vocabulary; }
    [[nodiscard]] const std::vector< var_id >& primed_vocabulary() const { return _primed_vocabulary; }
    [[nodiscard]] const std::map< var_id, var_id >& priming() const { return _to_primed; }
    [[nodiscard]] const bool_fn& law() const { return _law; }
    [[nodiscard]] const bool_fn& primed_law() const { return _primed_law; }
    [[nodiscard]] const std::map< std::string, bool_fn, std::less<> >& observations() const { return _obs; }

    [[nodiscard]] const bool_fn& observation( std::string_view agent ) const
    {
        auto it = _obs.find( agent );
        if ( it == _obs.end() )
            throw unknown_symbol_error( "unknown agent '" + std::string( agent ) + "'" );
        return it->second;
    }

    [[nodiscard]] bool has_agent( std::string_view agent ) const
    {
        return std::ranges::find( _agents, agent ) != _agents.end();
    }

    [[nodiscard]] std::optional< var_id > find( std::string_view name ) const
    {
        auto v = _mgr->find( name );
        if ( v && std::ranges::find( _vocabulary, *v ) != _vocabulary.end() )
            return v;
        return std::nullopt;
    }

    [[nodiscard]] std::vector< std::string > names() const
    {
        std::vector< std::string > out;
        for ( auto v : _vocabulary )
            out.push_back( _mgr->name( v ) );
        return out;
    }

    [[nodiscard]] std::set< var_id > assignment( const valuation& s ) const
    {
        std::set< var_id > out;
        for ( const auto& p : s )
        {
            auto v = find( p );
            if ( !v )
                throw unknown_symbol_error( "'" + p + "' is not in the vocabulary" );
            out.insert( *v );
        }
        return out;
    }

    // Evaluates a function over V at s, or over V and V' at (s, t').
    [[nodiscard]] bool holds( const bool_fn& f, const valuation& s, const valuation* t = nullptr ) const
    {
        auto a = assignment( s );
        if ( t )
            for ( auto v : assignment( *t ) )
                a.insert( _mgr->primed( v ) );
        return _mgr->holds( f, a );
    }

    [[nodiscard]] bool is_state( const valuation& s ) const { return holds( _law, s ); }
};

// States of the structure, in the engine's deterministic enumeration order.
inline std::vector< valuation > states( const belief_structure& f )
{
    auto& mgr = f.engine();
    std::vector< valuation > out;
    for ( const auto& a : mgr.sat_assignments( f.law(), f.vocabulary() ) )
    {
        auto& s = out.emplace_back();
        for ( auto v : a )
            s.insert( mgr.name( v ) );
    }
    return out;
}

class scene
{
    belief_structure _structure;
    valuation _state;

public:
    scene( belief_structure structure, valuation state ) : _structure{ std::move( structure ) }, _state{ std::move( state ) }
    {
        if ( !_structure.is_state( _state ) )
            throw error( "actual state " + to_string( _state ) + " violates the state law" );
    }

    [[nodiscard]] const belief_structure& structure() const { return _structure; }
    [[nodiscard]] const valuation& state() const { return _state; }
};

struct change
{
    std::string prop;
    formula law;
};

// (V+, event law, modified props with their change laws, event observations).
// Event observations range over V+ and its primed copy; agents without an
// entry observe nothing (Top).
struct transformer
{
    std::vector< std::string > added;
    formula event_law = formula::top();
    std::vector< change > changes;
    std::map< std::string, formula > observations;

    [[nodiscard]] const formula* change_law( std::string_view p ) const
    {
        for ( const auto& c : changes )
            if ( c.prop == p )
                return &c.law;
        return nullptr;
    }
};

struct event
{
    transformer trf;
    valuation actual;
};

namespace detail
{

inline bool_fn translate( const belief_structure& f, const formula& phi, const environment& free_atoms, bool under_box )
{
    auto& mgr = f.engine();
    switch ( phi.kind() )
    {
    case formula_kind::top: return mgr.constant( true );
    case formula_kind::bot: return mgr.constant( false );
    case formula_kind::atom: {
        if ( auto v = f.find( phi.name() ) )
            return mgr.var( *v );
        if ( auto it = free_atoms.find( phi.name() ); it != free_atoms.end() )
        {
            if ( under_box )
                throw error( "event atom '" + phi.name() + "' occurs under a belief operator" );
            return mgr.var( it->second );
        }
        throw unknown_symbol_error( "unknown atom '" + phi.name() + "'" );
    }
    case formula_kind::negation: return !translate( f, phi.operand(), free_atoms, under_box );
    case formula_kind::conjunction:
    case formula_kind::disjunction: {
        std::vector< bool_fn > parts;
        for ( const auto& g : phi.operands() )
            parts.push_back( translate( f, g, free_atoms, under_box ) );
        return mgr.combine( phi.kind() == formula_kind::conjunction ? bool_op::and_ : bool_op::or_, parts );
    }
    case formula_kind::implication:
    case formula_kind::equivalence:
        return mgr.apply( phi.kind() == formula_kind::implication ? bool_op::implies : bool_op::iff,
                          translate( f, phi.operand( 0 ), free_atoms, under_box ),
                          translate( f, phi.operand( 1 ), free_atoms, under_box ) );
    case formula_kind::box: {
        const auto& obs = f.observation( phi.name() );
        auto body = mgr.rename( translate( f, phi.operand(), free_atoms, true ), f.priming() );
        auto matrix = implication( f.primed_law(), implication( obs, body ) );
        return mgr.forall( matrix, f.primed_vocabulary() );
    }
    }
    return mgr.constant( false );
}

} // namespace detail

// Boolean function over V true exactly at the states where the formula holds.
// A box is translated to forall V' (law' -> (obs_i -> body')).
inline bool_fn bool_translate( const belief_structure& f, const formula& phi )
{
    return detail::translate( f, phi, {}, false );
}

inline bool scene_eval( const scene& sc, const formula& phi )
{
    return sc.structure().holds( bool_translate( sc.structure(), phi ), sc.state() );
}

struct transform_options
{
    // Rename modified propositions to their circled copies inside the old
    // observations. Only switched off to check that the property suites
    // notice the difference.
    bool circle_observations = true;
};

struct transform_result
{
    belief_structure structure;
    std::map< std::string, std::string > circled; // modified prop -> its circled copy
};

inline transform_result transform_traced( const belief_structure& f, const transformer& x, transform_options options = {} )
{
    auto& mgr = f.engine();

    std::set< std::string > added;
    for ( const auto& p : x.added )
    {
        if ( f.find( p ) )
            throw error( "event proposition '" + p + "' is already in the vocabulary" );
        if ( !added.insert( p ).second )
            throw error( "event proposition '" + p + "' is declared twice" );
    }
    std::set< std::string > modified;
    for ( const auto& c : x.changes )
    {
        if ( !f.find( c.prop ) )
            throw error( "change law for '" + c.prop + "', which is not in the vocabulary" );
        if ( !modified.insert( c.prop ).second )
            throw error( "two change laws for '" + c.prop + "'" );
    }

    std::vector< var_id > plus;
    for ( const auto& p : x.added )
        plus.push_back( mgr.declare( p ) );
    auto free_env = make_environment( mgr, plus );
    auto env = make_environment( mgr, f.vocabulary() );
    env.insert( free_env.begin(), free_env.end() );
    auto plus_env2 = make_environment( mgr, plus, true );

    auto event_law = detail::translate( f, x.event_law, free_env, false );

    std::map< var_id, var_id > circle, circle_both;
    std::map< std::string, std::string > circled;
    std::vector< var_id > copies;
    for ( const auto& c : x.changes )
    {
        auto v = *f.find( c.prop );
        auto o = mgr.fresh_circle( v );
        circle.emplace( v, o );
        circle_both.emplace( v, o );
        circle_both.emplace( mgr.primed( v ), mgr.primed( o ) );
        circled.emplace( c.prop, mgr.name( o ) );
        copies.push_back( o );
    }

    auto law = mgr.rename( f.law() & event_law, circle );
    for ( const auto& c : x.changes )
    {
        if ( !is_boolean( c.law ) )
            throw error( "change law for '" + c.prop + "' contains a box" );
        auto post = mgr.rename( compile( mgr, c.law, env ), circle );
        law = law & equivalence( mgr.var( *f.find( c.prop ) ), post );
    }

    std::map< std::string, bool_fn, std::less<> > obs;
    for ( const auto& [ agent, o ] : x.observations )
        if ( !f.has_agent( agent ) )
            throw unknown_symbol_error( "event observation for unknown agent '" + agent + "'" );
    for ( const auto& agent : f.agents() )
    {
        auto old = f.observation( agent );
        if ( options.circle_observations )
            old = mgr.rename( old, circle_both );
        auto extra = mgr.constant( true );
        if ( auto it = x.observations.find( agent ); it != x.observations.end() )
        {
            for ( const auto& a : vocabulary( it->second ) )
                if ( !plus_env2.contains( a ) )
                    throw error( "event observation of " + agent + " mentions '" + a
                                 + "', which is not an event proposition" );
            extra = compile( mgr, it->second, plus_env2 );
        }
        obs.emplace( agent, old & extra );
    }

    auto vocab = f.vocabulary();
    vocab.insert( vocab.end(), plus.begin(), plus.end() );
    vocab.insert( vocab.end(), copies.begin(), copies.end() );
    return { belief_structure( mgr, f.agents(), std::move( vocab ), law, std::move( obs ) ), std::move( circled ) };
}

inline belief_structure transform( const belief_structure& f, const transformer& x, transform_options options = {} )
{
    return transform_traced( f, x, options ).structure;
}

// The state reached from old state s by event (x, actual): unmodified facts are
// kept, modified ones are remembered in their circled copies and recomputed
// from the change laws, and the event propositions of `actual` are added.
inline valuation next_state( const valuation& s, const event& ev, const std::map< std::string, std::string >& circled )
{
    valuation old_and_event = s;
    old_and_event.insert( ev.actual.begin(), ev.actual.end() );

    valuation out;
    for ( const auto& p : s )
    {
        if ( auto it = circled.find( p ); it != circled.end() )
            out.insert( it->second );
        else
            out.insert( p );
    }
    out.insert( ev.actual.begin(), ev.actual.end() );
    for ( const auto& c : ev.trf.changes )
        if ( holds( c.law, old_and_event ) )
            out.insert( c.prop );
    return out;
}

inline scene apply_event( const scene& sc, const event& ev, transform_options options = {} )
{
    for ( const auto& p : ev.actual )
        if ( std::ranges::find( ev.trf.added, p ) == ev.trf.added.end() )
            throw error( "actual event proposition '" + p + "' is not an event proposition" );
    auto result = transform_traced( sc.structure(), ev.trf, options );
    auto s = next_state( sc.state(), ev, result.circled );
    if ( !result.structure.is_state( s ) )
        throw not_executable_error( "event " + to_string( ev.actual ) + " is not executable at " + to_string( sc.state() ) );
    return { std::move( result.structure ), std::move( s ) };
}

// Propositions whose value is fixed by the state law, with that value.
inline std::vector< std::pair< var_id, bool > > determined( const belief_structure& f )
{
    auto& mgr = f.engine();
    std::vector< std::pair< var_id, bool > > out;
    for ( auto v : f.vocabulary() )
    {
        if ( mgr.implies( f.law(), mgr.var( v ) ) )
            out.emplace_back( v, true );
        else if ( mgr.implies( f.law(), !mgr.var( v ) ) )
            out.emplace_back( v, false );
    }
    return out;
}

// Removes every proposition outside `keep`; each must be determined by the law.
// Formulas over the kept vocabulary keep their truth value at every state.
inline belief_structure minimize( const belief_structure& f, const std::set< std::string >& keep )
{
    auto& mgr = f.engine();
    auto law = f.law();
    auto obs = f.observations();
    std::vector< var_id > vocab;
    for ( auto v : f.vocabulary() )
    {
        if ( keep.contains( mgr.name( v ) ) )
        {
            vocab.push_back( v );
            continue;
        }
        bool value;
        if ( mgr.implies( law, mgr.var( v ) ) )
            value = true;
        else if ( mgr.implies( law, !mgr.var( v ) ) )
            value = false;
        else
            throw not_determined_error( mgr.name( v ) );
        law = mgr.restrict( law, v, value );
        for ( auto& [ agent, o ] : obs )
            o = mgr.restrict( mgr.restrict( o, v, value ), mgr.primed( v ), value );
    }
    return { mgr, f.agents(), std::move( vocab ), law, std::move( obs ) };
}

inline scene minimize( const scene& sc, const std::set< std::string >& keep )
{
    valuation s;
    for ( const auto& p : sc.state() )
        if ( keep.contains( p ) )
            s.insert( p );
    return { minimize( sc.structure(), keep ), std::move( s ) };
}

} // namespace symdel
