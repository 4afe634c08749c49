#pragma once

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace symdel
{

// One boolean variable of an engine. Every proposition owns two variables: the
// base one and its primed twin. Circled copies are propositions in their own
// right, remembering which proposition they copy.
struct var_id
{
    std::uint32_t index = 0;

    friend auto operator<=>( var_id, var_id ) = default;
};

enum class var_kind : std::uint8_t
{
    base,
    primed
};

enum class bool_op : std::uint8_t
{
    and_,
    or_,
    not_,
    implies,
    iff
};

class bdd_manager;

// A boolean function bound to one engine. Two functions of the same engine are
// equal iff they denote the same function (reduced ordered BDDs are canonical).
class bool_fn
{
public:
    bool_fn() = default;

    [[nodiscard]] bdd_manager* engine() const { return _mgr; }
    [[nodiscard]] std::uint32_t node() const { return _node; }
    [[nodiscard]] bool is_true() const { return _mgr != nullptr && _node == 1; }
    [[nodiscard]] bool is_false() const { return _mgr != nullptr && _node == 0; }

    friend bool operator==( const bool_fn& a, const bool_fn& b )
    {
        return a._mgr == b._mgr && a._node == b._node;
    }

private:
    friend class bdd_manager;

    bool_fn( bdd_manager* mgr, std::uint32_t node ) : _mgr{ mgr }, _node{ node } {}

    bdd_manager* _mgr = nullptr;
    std::uint32_t _node = 0;
};

class bdd_manager
{
    static constexpr std::uint32_t terminal_var = std::numeric_limits< std::uint32_t >::max();

    struct node_t
    {
        std::uint32_t var;
        std::uint32_t lo;
        std::uint32_t hi;
    };

    struct var_info
    {
        std::string name;
        var_kind kind;
        std::uint32_t twin;                  // primed <-> base
        std::optional< std::uint32_t > origin; // set for circled copies
        std::uint32_t generation = 0;
    };

    struct triple_hash
    {
        std::size_t operator()( const std::array< std::uint32_t, 3 >& k ) const noexcept
        {
            std::uint64_t h = k[ 0 ];
            h = h * 0x9E3779B97F4A7C15ull ^ k[ 1 ];
            h = h * 0x9E3779B97F4A7C15ull ^ k[ 2 ];
            return static_cast< std::size_t >( h ^ ( h >> 29 ) );
        }
    };

    using triple = std::array< std::uint32_t, 3 >;

    std::vector< node_t > _nodes;
    std::unordered_map< triple, std::uint32_t, triple_hash > _unique;
    std::unordered_map< triple, std::uint32_t, triple_hash > _ite_cache;

    std::vector< var_info > _vars;
    std::vector< std::uint32_t > _order;    // position -> var
    std::vector< std::uint32_t > _position; // var -> position
    std::unordered_map< std::string, std::uint32_t > _by_name;
    std::map< std::uint32_t, std::uint32_t > _circle_count;

public:
    bdd_manager()
    {
        _nodes.push_back( { terminal_var, 0, 0 } );
        _nodes.push_back( { terminal_var, 1, 1 } );
    }

    bdd_manager( const bdd_manager& ) = delete;
    bdd_manager& operator=( const bdd_manager& ) = delete;

    // ---- variables -------------------------------------------------------

    // Returns the base variable of proposition `name`, creating it (and its
    // primed twin) at the end of the order when it does not exist yet.
    var_id declare( std::string_view name )
    {
        if ( name.empty() || name.back() == '\'' )
            throw error( "invalid proposition name '" + std::string( name ) + "'" );
        if ( auto it = _by_name.find( std::string( name ) ); it != _by_name.end() )
        {
            if ( _vars[ it->second ].kind != var_kind::base )
                throw error( "'" + std::string( name ) + "' names a primed variable" );
            return var_id{ it->second };
        }
        return add_pair( std::string( name ), _order.size(), std::nullopt, 0 );
    }

    // Allocates a fresh circled copy of `base`, placed right after the base
    // variable and its primed twin.
    var_id fresh_circle( var_id base )
    {
        assert( kind( base ) == var_kind::base );
        auto gen = ++_circle_count[ base.index ];
        auto stem = _vars[ base.index ].name + "@o";
        auto name = gen == 1 ? stem : stem + std::to_string( gen );
        while ( _by_name.contains( name ) )
            name = stem + std::to_string( ++gen );
        _circle_count[ base.index ] = gen;
        auto after = _position[ primed( base ).index ] + 1;
        return add_pair( std::move( name ), after, base.index, gen );
    }

    // First name of the form stem1, stem2, ... that is neither declared nor in `avoid`.
    [[nodiscard]] std::string fresh_name( std::string_view stem, const std::set< std::string >& avoid = {} ) const
    {
        for ( std::size_t k = 1;; ++k )
        {
            auto candidate = std::string( stem ) + std::to_string( k );
            if ( !_by_name.contains( candidate ) && !avoid.contains( candidate ) )
                return candidate;
        }
    }

    [[nodiscard]] std::optional< var_id > find( std::string_view name ) const
    {
        if ( auto it = _by_name.find( std::string( name ) ); it != _by_name.end() )
            return var_id{ it->second };
        return std::nullopt;
    }

    [[nodiscard]] var_id lookup( std::string_view name ) const
    {
        if ( auto v = find( name ) )
            return *v;
        throw unknown_symbol_error( "unknown proposition '" + std::string( name ) + "'" );
    }

    [[nodiscard]] var_id primed( var_id v ) const
    {
        assert( kind( v ) == var_kind::base );
        return var_id{ _vars[ v.index ].twin };
    }

    [[nodiscard]] var_id unprimed( var_id v ) const
    {
        return kind( v ) == var_kind::base ? v : var_id{ _vars[ v.index ].twin };
    }

    [[nodiscard]] const std::string& name( var_id v ) const { return _vars.at( v.index ).name; }
    [[nodiscard]] var_kind kind( var_id v ) const { return _vars.at( v.index ).kind; }

    [[nodiscard]] std::optional< var_id > circle_origin( var_id v ) const
    {
        if ( auto o = _vars.at( v.index ).origin )
            return var_id{ *o };
        return std::nullopt;
    }

    [[nodiscard]] std::size_t position( var_id v ) const { return _position.at( v.index ); }
    [[nodiscard]] std::size_t var_count() const { return _vars.size(); }
    [[nodiscard]] std::size_t node_count() const { return _nodes.size(); }

    // ---- construction ----------------------------------------------------

    bool_fn constant( bool b ) { return { this, b ? 1u : 0u }; }

    bool_fn var( var_id v )
    {
        check_var( v );
        return { this, make( v.index, 0, 1 ) };
    }

    bool_fn literal( var_id v, bool positive )
    {
        check_var( v );
        return positive ? bool_fn{ this, make( v.index, 0, 1 ) } : bool_fn{ this, make( v.index, 1, 0 ) };
    }

    bool_fn negate( const bool_fn& f ) { return { this, ite_rec( own( f ), 0, 1 ) }; }

    bool_fn ite( const bool_fn& f, const bool_fn& g, const bool_fn& h )
    {
        return { this, ite_rec( own( f ), own( g ), own( h ) ) };
    }

    bool_fn apply( bool_op op, const bool_fn& f, const bool_fn& g )
    {
        auto a = own( f ), b = own( g );
        switch ( op )
        {
        case bool_op::and_: return { this, ite_rec( a, b, 0 ) };
        case bool_op::or_: return { this, ite_rec( a, 1, b ) };
        case bool_op::implies: return { this, ite_rec( a, b, 1 ) };
        case bool_op::iff: return { this, ite_rec( a, b, ite_rec( b, 0, 1 ) ) };
        case bool_op::not_: break;
        }
        throw error( "negation is unary" );
    }

    // n-ary combination; `not_` takes exactly one argument, `implies` and `iff` two.
    bool_fn combine( bool_op op, std::span< const bool_fn > args )
    {
        switch ( op )
        {
        case bool_op::not_:
            if ( args.size() != 1 )
                throw error( "negation takes one argument" );
            return negate( args[ 0 ] );
        case bool_op::implies:
        case bool_op::iff:
            if ( args.size() != 2 )
                throw error( "binary connective takes two arguments" );
            return apply( op, args[ 0 ], args[ 1 ] );
        case bool_op::and_:
        case bool_op::or_: {
            auto acc = constant( op == bool_op::and_ );
            for ( const auto& a : args )
                acc = apply( op, acc, a );
            return acc;
        }
        }
        return constant( false );
    }

    // ---- substitution and quantification ---------------------------------

    bool_fn restrict( const bool_fn& f, var_id v, bool value )
    {
        check_var( v );
        std::unordered_map< std::uint32_t, std::uint32_t > memo;
        return { this, restrict_rec( own( f ), v.index, value, memo ) };
    }

    // f with variable v replaced by the function g.
    bool_fn compose( const bool_fn& f, var_id v, const bool_fn& g )
    {
        auto hi = restrict( f, v, true );
        auto lo = restrict( f, v, false );
        return ite( g, hi, lo );
    }

    // Simultaneous variable-for-variable substitution. The map must be
    // injective and its range must avoid the variables of f it leaves alone.
    bool_fn rename( const bool_fn& f, const std::map< var_id, var_id >& mapping )
    {
        if ( mapping.empty() )
            return f;
        std::set< var_id > range;
        for ( auto [ from, to ] : mapping )
        {
            check_var( from );
            check_var( to );
            if ( !range.insert( to ).second )
                throw error( "rename: mapping is not injective" );
        }
        for ( auto v : support( f ) )
            if ( !mapping.contains( v ) && range.contains( v ) )
                throw error( "rename: target '" + name( v ) + "' collides with the retained support" );

        std::unordered_map< std::uint32_t, std::uint32_t > memo;
        return { this, rename_rec( own( f ), mapping, memo ) };
    }

    bool_fn exists( const bool_fn& f, std::span< const var_id > vars ) { return quantify( f, vars, false ); }
    bool_fn forall( const bool_fn& f, std::span< const var_id > vars ) { return quantify( f, vars, true ); }

    // ---- queries ---------------------------------------------------------

    // Variables the function depends on, in order position.
    [[nodiscard]] std::vector< var_id > support( const bool_fn& f ) const
    {
        std::set< std::uint32_t > seen, vars;
        std::vector< std::uint32_t > stack{ f.node() };
        while ( !stack.empty() )
        {
            auto n = stack.back();
            stack.pop_back();
            if ( n < 2 || !seen.insert( n ).second )
                continue;
            vars.insert( _nodes[ n ].var );
            stack.push_back( _nodes[ n ].lo );
            stack.push_back( _nodes[ n ].hi );
        }
        std::vector< var_id > out;
        for ( auto v : vars )
            out.push_back( var_id{ v } );
        std::ranges::sort( out, [ this ]( var_id a, var_id b ) { return position( a ) < position( b ); } );
        return out;
    }

    // Variables missing from the assignment are false.
    [[nodiscard]] bool holds( const bool_fn& f, const std::set< var_id >& assignment ) const
    {
        auto n = f.node();
        while ( n > 1 )
            n = assignment.contains( var_id{ _nodes[ n ].var } ) ? _nodes[ n ].hi : _nodes[ n ].lo;
        return n == 1;
    }

    [[nodiscard]] bool is_tautology( const bool_fn& f ) const { return f.node() == 1; }

    bool implies( const bool_fn& f, const bool_fn& g ) { return apply( bool_op::implies, f, g ).is_true(); }

    // All subsets of `universe` satisfying f. Each assignment lists its true
    // variables in universe order; assignments are sorted lexicographically
    // by that listing (a proper prefix comes first).
    [[nodiscard]] std::vector< std::vector< var_id > > sat_assignments( const bool_fn& f,
                                                                      std::span< const var_id > universe ) const
    {
        for ( auto v : support( f ) )
            if ( std::ranges::find( universe, v ) == universe.end() )
                throw error( "sat_assignments: '" + name( v ) + "' is outside the universe" );

        std::vector< std::size_t > by_level( universe.size() );
        for ( std::size_t i = 0; i < universe.size(); ++i )
            by_level[ i ] = i;
        std::ranges::sort( by_level,
                           [ & ]( std::size_t a, std::size_t b ) { return position( universe[ a ] ) < position( universe[ b ] ); } );

        std::vector< std::vector< std::size_t > > found;
        std::vector< std::size_t > current;
        enumerate_rec( f.node(), 0, by_level, universe, current, found );
        for ( auto& a : found )
            std::ranges::sort( a );
        std::ranges::sort( found );

        std::vector< std::vector< var_id > > out;
        out.reserve( found.size() );
        for ( const auto& a : found )
        {
            auto& row = out.emplace_back();
            for ( auto i : a )
                row.push_back( universe[ i ] );
        }
        return out;
    }

    // Node structure access for printers.
    [[nodiscard]] var_id top_var( const bool_fn& f ) const { return var_id{ _nodes.at( f.node() ).var }; }
    [[nodiscard]] bool_fn low( const bool_fn& f ) { return { this, _nodes.at( f.node() ).lo }; }
    [[nodiscard]] bool_fn high( const bool_fn& f ) { return { this, _nodes.at( f.node() ).hi }; }

private:
    var_id add_pair( std::string name, std::size_t at, std::optional< std::uint32_t > origin, std::uint32_t gen )
    {
        auto base = static_cast< std::uint32_t >( _vars.size() );
        auto prime = base + 1;
        _vars.push_back( { name, var_kind::base, prime, origin, gen } );
        _vars.push_back( { name + "'", var_kind::primed, base, std::nullopt, gen } );
        _by_name.emplace( name, base );
        _by_name.emplace( name + "'", prime );
        _position.resize( _vars.size() );
        _order.insert( _order.begin() + static_cast< std::ptrdiff_t >( at ), { base, prime } );
        for ( std::size_t p = at; p < _order.size(); ++p )
            _position[ _order[ p ] ] = static_cast< std::uint32_t >( p );
        return var_id{ base };
    }

    void check_var( var_id v ) const
    {
        if ( v.index >= _vars.size() )
            throw error( "variable does not belong to this engine" );
    }

    std::uint32_t own( const bool_fn& f ) const
    {
        if ( f.engine() != this )
            throw error( "boolean function belongs to a different engine" );
        return f.node();
    }

    [[nodiscard]] std::uint32_t level( std::uint32_t n ) const
    {
        return n < 2 ? std::numeric_limits< std::uint32_t >::max() : _position[ _nodes[ n ].var ];
    }

    std::uint32_t make( std::uint32_t var, std::uint32_t lo, std::uint32_t hi )
    {
        if ( lo == hi )
            return lo;
        triple key{ var, lo, hi };
        if ( auto it = _unique.find( key ); it != _unique.end() )
            return it->second;
        auto id = static_cast< std::uint32_t >( _nodes.size() );
        _nodes.push_back( { var, lo, hi } );
        _unique.emplace( key, id );
        return id;
    }

    std::pair< std::uint32_t, std::uint32_t > cofactors( std::uint32_t n, std::uint32_t lvl ) const
    {
        if ( level( n ) != lvl )
            return { n, n };
        return { _nodes[ n ].lo, _nodes[ n ].hi };
    }

    std::uint32_t ite_rec( std::uint32_t f, std::uint32_t g, std::uint32_t h )
    {
        if ( f == 1 )
            return g;
        if ( f == 0 )
            return h;
        if ( g == h )
            return g;
        if ( g == 1 && h == 0 )
            return f;

        triple key{ f, g, h };
        if ( auto it = _ite_cache.find( key ); it != _ite_cache.end() )
            return it->second;

        auto lvl = std::min( { level( f ), level( g ), level( h ) } );
        auto var = _order[ lvl ];
        auto [ f0, f1 ] = cofactors( f, lvl );
        auto [ g0, g1 ] = cofactors( g, lvl );
        auto [ h0, h1 ] = cofactors( h, lvl );
        auto lo = ite_rec( f0, g0, h0 );
        auto hi = ite_rec( f1, g1, h1 );
        auto r = make( var, lo, hi );
        _ite_cache.emplace( key, r );
        return r;
    }

    std::uint32_t restrict_rec( std::uint32_t f, std::uint32_t var, bool value,
                                std::unordered_map< std::uint32_t, std::uint32_t >& memo )
    {
        if ( level( f ) > _position[ var ] )
            return f;
        if ( _nodes[ f ].var == var )
            return value ? _nodes[ f ].hi : _nodes[ f ].lo;
        if ( auto it = memo.find( f ); it != memo.end() )
            return it->second;
        auto n = _nodes[ f ];
        auto r = make( n.var, restrict_rec( n.lo, var, value, memo ), restrict_rec( n.hi, var, value, memo ) );
        memo.emplace( f, r );
        return r;
    }

    std::uint32_t rename_rec( std::uint32_t f, const std::map< var_id, var_id >& mapping,
                              std::unordered_map< std::uint32_t, std::uint32_t >& memo )
    {
        if ( f < 2 )
            return f;
        if ( auto it = memo.find( f ); it != memo.end() )
            return it->second;
        auto n = _nodes[ f ];
        auto lo = rename_rec( n.lo, mapping, memo );
        auto hi = rename_rec( n.hi, mapping, memo );
        auto target = n.var;
        if ( auto it = mapping.find( var_id{ n.var } ); it != mapping.end() )
            target = it->second.index;
        auto r = ite_rec( make( target, 0, 1 ), hi, lo );
        memo.emplace( f, r );
        return r;
    }

    std::uint32_t quantify_rec( std::uint32_t f, std::uint32_t var, bool universal,
                                std::unordered_map< std::uint32_t, std::uint32_t >& memo )
    {
        if ( level( f ) > _position[ var ] )
            return f;
        if ( auto it = memo.find( f ); it != memo.end() )
            return it->second;
        auto n = _nodes[ f ];
        std::uint32_t r;
        if ( n.var == var )
            r = universal ? ite_rec( n.lo, n.hi, 0 ) : ite_rec( n.lo, 1, n.hi );
        else
            r = make( n.var, quantify_rec( n.lo, var, universal, memo ), quantify_rec( n.hi, var, universal, memo ) );
        memo.emplace( f, r );
        return r;
    }

    // Eliminates one variable at a time, deepest in the order first.
    bool_fn quantify( const bool_fn& f, std::span< const var_id > vars, bool universal )
    {
        std::vector< var_id > sorted( vars.begin(), vars.end() );
        for ( auto v : sorted )
            check_var( v );
        std::ranges::sort( sorted, [ this ]( var_id a, var_id b ) { return position( a ) > position( b ); } );
        auto n = own( f );
        for ( auto v : sorted )
        {
            std::unordered_map< std::uint32_t, std::uint32_t > memo;
            n = quantify_rec( n, v.index, universal, memo );
        }
        return { this, n };
    }

    void enumerate_rec( std::uint32_t n, std::size_t depth, const std::vector< std::size_t >& by_level,
                        std::span< const var_id > universe, std::vector< std::size_t >& current,
                        std::vector< std::vector< std::size_t > >& found ) const
    {
        if ( n == 0 )
            return;
        if ( depth == by_level.size() )
        {
            assert( n == 1 );
            found.push_back( current );
            return;
        }
        auto idx = by_level[ depth ];
        auto v = universe[ idx ];
        std::uint32_t lo = n, hi = n;
        if ( n > 1 && _nodes[ n ].var == v.index )
        {
            lo = _nodes[ n ].lo;
            hi = _nodes[ n ].hi;
        }
        enumerate_rec( lo, depth + 1, by_level, universe, current, found );
        current.push_back( idx );
        enumerate_rec( hi, depth + 1, by_level, universe, current, found );
        current.pop_back();
    }
};

inline bool_fn operator&( const bool_fn& a, const bool_fn& b ) { return a.engine()->apply( bool_op::and_, a, b ); }
inline bool_fn operator|( const bool_fn& a, const bool_fn& b ) { return a.engine()->apply( bool_op::or_, a, b ); }
inline bool_fn operator!( const bool_fn& a ) { return a.engine()->negate( a ); }
inline bool_fn implication( const bool_fn& a, const bool_fn& b ) { return a.engine()->apply( bool_op::implies, a, b ); }
inline bool_fn equivalence( const bool_fn& a, const bool_fn& b ) { return a.engine()->apply( bool_op::iff, a, b ); }

} // namespace symdel
