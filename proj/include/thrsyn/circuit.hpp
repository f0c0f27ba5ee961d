#pragma once

#include <thrsyn/boolfn.hpp>
#include <thrsyn/common.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace thrsyn
{

enum class gate_kind
{
  var,
  lit,
  and_,
  or_,
  thr
};

inline const char* to_string( gate_kind kind )
{
  switch ( kind )
  {
  case gate_kind::var:
    return "var";
  case gate_kind::lit:
    return "lit";
  case gate_kind::and_:
    return "and";
  case gate_kind::or_:
    return "or";
  case gate_kind::thr:
    return "thr";
  }
  return "?";
}

/// One gate. `var` is the 1-based input coordinate of var/lit gates. Threshold
/// gates always have threshold 2: they output 1 iff at least two children are 1.
struct gate
{
  gate_kind kind = gate_kind::var;
  uint32_t var = 0;
  bool negated = false;
  std::vector<uint32_t> children;

  bool is_leaf() const { return kind == gate_kind::var || kind == gate_kind::lit; }
  friend bool operator==( const gate&, const gate& ) = default;
};

/// Gate dag over n inputs. Children always have smaller ids than their parent,
/// so the gate list is a topological order and cycles cannot be expressed.
class circuit
{
public:
  circuit() = default;
  explicit circuit( uint32_t n ) : n_( n )
  {
    if ( n == 0 )
      throw precondition_error( "circuit arity must be positive" );
  }

  uint32_t arity() const { return n_; }
  std::size_t num_gates() const { return gates_.size(); }
  const std::vector<gate>& gates() const { return gates_; }
  const gate& operator[]( uint32_t id ) const { return gates_.at( id ); }

  uint32_t output() const
  {
    if ( !output_ )
      throw precondition_error( "circuit has no output gate" );
    return *output_;
  }
  bool has_output() const { return output_.has_value(); }
  void set_output( uint32_t id )
  {
    if ( id >= gates_.size() )
      throw precondition_error( "output gate " + std::to_string( id ) + " does not exist" );
    output_ = id;
  }

  uint32_t add_var( uint32_t coordinate ) { return add_lit( coordinate, false, gate_kind::var ); }
  uint32_t add_lit( uint32_t coordinate, bool negated ) { return add_lit( coordinate, negated, gate_kind::lit ); }
  uint32_t add_and( uint32_t a, uint32_t b ) { return add_internal( gate_kind::and_, { a, b } ); }
  uint32_t add_or( uint32_t a, uint32_t b ) { return add_internal( gate_kind::or_, { a, b } ); }
  uint32_t add_thr( std::vector<uint32_t> children )
  {
    if ( children.size() < 3 )
      throw precondition_error( "threshold gates need fan-in k+1 >= 3" );
    return add_internal( gate_kind::thr, std::move( children ) );
  }
  uint32_t add_maj3( uint32_t a, uint32_t b, uint32_t c ) { return add_thr( { a, b, c } ); }

  /// Appends an already-formed gate (used by importers and transformations).
  uint32_t add_gate( gate g )
  {
    switch ( g.kind )
    {
    case gate_kind::var:
    case gate_kind::lit:
      if ( !g.children.empty() )
        throw precondition_error( "var/lit gates have no children" );
      return add_lit( g.var, g.kind == gate_kind::lit && g.negated, g.kind );
    case gate_kind::and_:
    case gate_kind::or_:
      if ( g.children.size() != 2 )
        throw precondition_error( "and/or gates have fan-in 2" );
      return add_internal( g.kind, std::move( g.children ) );
    case gate_kind::thr:
      return add_thr( std::move( g.children ) );
    }
    throw precondition_error( "unknown gate kind" );
  }

  friend bool operator==( const circuit&, const circuit& ) = default;

private:
  uint32_t add_lit( uint32_t coordinate, bool negated, gate_kind kind )
  {
    if ( coordinate < 1 || coordinate > n_ )
      throw precondition_error( "variable coordinate " + std::to_string( coordinate ) + " outside [1, " + std::to_string( n_ ) + "]" );
    gate g;
    g.kind = kind;
    g.var = coordinate;
    g.negated = negated;
    gates_.push_back( std::move( g ) );
    return static_cast<uint32_t>( gates_.size() - 1 );
  }

  uint32_t add_internal( gate_kind kind, std::vector<uint32_t> children )
  {
    for ( auto c : children )
      if ( c >= gates_.size() )
        throw precondition_error( "child " + std::to_string( c ) + " must be created before its parent" );
    gate g;
    g.kind = kind;
    g.children = std::move( children );
    gates_.push_back( std::move( g ) );
    return static_cast<uint32_t>( gates_.size() - 1 );
  }

  uint32_t n_ = 0;
  std::vector<gate> gates_;
  std::optional<uint32_t> output_;
};

namespace detail
{

inline bool eval_gate( const gate& g, uint64_t input, const std::vector<uint8_t>& values )
{
  switch ( g.kind )
  {
  case gate_kind::var:
    return ( input >> ( g.var - 1 ) ) & 1u;
  case gate_kind::lit:
    return static_cast<bool>( ( input >> ( g.var - 1 ) ) & 1u ) != g.negated;
  case gate_kind::and_:
    return values[g.children[0]] && values[g.children[1]];
  case gate_kind::or_:
    return values[g.children[0]] || values[g.children[1]];
  case gate_kind::thr:
  {
    uint32_t ones = 0;
    for ( auto c : g.children )
      ones += values[c];
    return ones >= 2;
  }
  }
  return false;
}

/// Word holding input coordinate `coordinate` for the 64 consecutive inputs starting at `base`.
inline uint64_t variable_word( uint32_t coordinate, uint64_t base )
{
  static constexpr uint64_t patterns[6] = { 0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
                                            0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull };
  const auto bit = coordinate - 1;
  if ( bit < 6 )
    return patterns[bit];
  return ( ( base >> bit ) & 1u ) ? ~uint64_t{ 0 } : 0;
}

inline std::vector<uint8_t> reachable( const circuit& c )
{
  std::vector<uint8_t> mark( c.num_gates(), 0 );
  if ( !c.has_output() )
    return mark;
  mark[c.output()] = 1;
  for ( auto id = c.num_gates(); id-- > 0; )
    if ( mark[id] )
      for ( auto ch : c[static_cast<uint32_t>( id )].children )
        mark[ch] = 1;
  return mark;
}

} // namespace detail

/// Values of every gate under input x.
inline std::vector<uint8_t> evaluate_gates( const circuit& c, const bit_vector& x )
{
  if ( x.n != c.arity() )
    throw precondition_error( "input arity " + std::to_string( x.n ) + " does not match circuit arity " + std::to_string( c.arity() ) );
  std::vector<uint8_t> values( c.num_gates() );
  for ( std::size_t id = 0; id < c.num_gates(); ++id )
    values[id] = detail::eval_gate( c.gates()[id], x.bits, values );
  return values;
}

inline bool evaluate( const circuit& c, const bit_vector& x )
{
  return evaluate_gates( c, x )[c.output()];
}

/// Longest output-to-leaf path, counting non-leaf gates. Negations in literals are free.
inline uint32_t depth( const circuit& c )
{
  std::vector<uint32_t> d( c.num_gates(), 0 );
  for ( std::size_t id = 0; id < c.num_gates(); ++id )
  {
    const auto& g = c.gates()[id];
    if ( g.is_leaf() )
      continue;
    uint32_t best = 0;
    for ( auto ch : g.children )
      best = std::max( best, d[ch] );
    d[id] = best + 1;
  }
  return d.at( c.output() );
}

/// Number of gates reachable from the output.
inline std::size_t size( const circuit& c )
{
  const auto mark = detail::reachable( c );
  return static_cast<std::size_t>( std::count( mark.begin(), mark.end(), 1 ) );
}

/// Copy of c without gates unreachable from the output; relative order is kept.
inline circuit prune( const circuit& c )
{
  const auto mark = detail::reachable( c );
  circuit out( c.arity() );
  std::vector<uint32_t> remap( c.num_gates(), 0 );
  for ( std::size_t id = 0; id < c.num_gates(); ++id )
  {
    if ( !mark[id] )
      continue;
    gate g = c.gates()[id];
    for ( auto& ch : g.children )
      ch = remap[ch];
    remap[id] = out.add_gate( std::move( g ) );
  }
  out.set_output( remap[c.output()] );
  return out;
}

/// Full truth table by bit-parallel evaluation over blocks of 64 inputs.
inline truth_table to_truth_table( const circuit& c, uint32_t max_arity = 24 )
{
  if ( c.arity() > max_arity )
    throw budget_error( "truth table of a " + std::to_string( c.arity() ) + "-input circuit exceeds the evaluation budget of 2^" +
                        std::to_string( max_arity ) );
  const auto pruned = prune( c );
  truth_table t( c.arity() );
  std::vector<uint64_t> words( pruned.num_gates() );
  for ( uint64_t base = 0; base < t.size(); base += 64 )
  {
    for ( std::size_t id = 0; id < pruned.num_gates(); ++id )
    {
      const auto& g = pruned.gates()[id];
      uint64_t w = 0;
      switch ( g.kind )
      {
      case gate_kind::var:
        w = detail::variable_word( g.var, base );
        break;
      case gate_kind::lit:
        w = detail::variable_word( g.var, base ) ^ ( g.negated ? ~uint64_t{ 0 } : 0 );
        break;
      case gate_kind::and_:
        w = words[g.children[0]] & words[g.children[1]];
        break;
      case gate_kind::or_:
        w = words[g.children[0]] | words[g.children[1]];
        break;
      case gate_kind::thr:
      {
        uint64_t ones = 0, twos = 0;
        for ( auto ch : g.children )
        {
          twos |= ones & words[ch];
          ones |= words[ch];
        }
        w = twos;
        break;
      }
      }
      words[id] = w;
    }
    const auto out = words[pruned.output()];
    const auto block = std::min<uint64_t>( 64, t.size() - base );
    for ( uint64_t i = 0; i < block; ++i )
      t.set( base + i, ( out >> i ) & 1u );
  }
  return t;
}

struct leq_result
{
  bool holds = true;
  std::optional<bit_vector> counterexample;
  explicit operator bool() const { return holds; }
};

/// C <= f: C vanishes on every zero of f. Reports the lowest-index violation.
inline leq_result leq( const circuit& c, const truth_table& f )
{
  if ( c.arity() != f.arity() )
    throw precondition_error( "leq: circuit arity " + std::to_string( c.arity() ) + " differs from function arity " +
                              std::to_string( f.arity() ) );
  const auto table = to_truth_table( c, truth_table::max_arity );
  for ( uint64_t x = 0; x < f.size(); ++x )
    if ( !f.get( x ) && table.get( x ) )
      return { false, bit_vector( f.arity(), x ) };
  return {};
}

/// A gate kind together with its fan-in; threshold gates differ by fan-in.
struct gate_shape
{
  gate_kind kind;
  uint32_t fanin = 0;
  friend bool operator==( const gate_shape&, const gate_shape& ) = default;
};

inline gate_shape shape_of( const gate& g )
{
  return { g.kind, static_cast<uint32_t>( g.children.size() ) };
}

inline std::string to_string( const gate_shape& s )
{
  if ( s.kind == gate_kind::thr )
    return "thr" + std::to_string( s.fanin );
  return to_string( s.kind );
}

/// Set of allowed gate shapes.
struct basis
{
  std::vector<gate_shape> shapes;

  bool allows( const gate_shape& s ) const { return std::find( shapes.begin(), shapes.end(), s ) != shapes.end(); }

  /// {MAJ3, variables}
  static basis maj3() { return { { { gate_kind::thr, 3 }, { gate_kind::var, 0 } } }; }
  /// {THR(k+1, 2), variables} and literals when `literals` is set.
  static basis threshold( uint32_t k, bool literals )
  {
    basis b{ { { gate_kind::thr, k + 1 }, { gate_kind::var, 0 } } };
    if ( literals )
      b.shapes.push_back( { gate_kind::lit, 0 } );
    return b;
  }
  /// {AND, OR, variables}
  static basis monotone() { return { { { gate_kind::and_, 2 }, { gate_kind::or_, 2 }, { gate_kind::var, 0 } } }; }
};

/// True iff every gate reachable from the output has an allowed shape.
inline bool basis_check( const circuit& c, const basis& allowed )
{
  const auto mark = detail::reachable( c );
  for ( std::size_t id = 0; id < c.num_gates(); ++id )
    if ( mark[id] && !allowed.allows( shape_of( c.gates()[id] ) ) )
      return false;
  return true;
}

/// Count of reachable gates per shape, e.g. {"thr3": 10, "var": 11}.
inline std::map<std::string, std::size_t> gate_histogram( const circuit& c )
{
  std::map<std::string, std::size_t> h;
  const auto mark = detail::reachable( c );
  for ( std::size_t id = 0; id < c.num_gates(); ++id )
    if ( mark[id] )
      ++h[to_string( shape_of( c.gates()[id] ) )];
  return h;
}

/// True iff every reachable gate feeds at most one parent input.
inline bool is_formula( const circuit& c )
{
  const auto mark = detail::reachable( c );
  std::vector<uint32_t> parents( c.num_gates(), 0 );
  for ( std::size_t id = 0; id < c.num_gates(); ++id )
    if ( mark[id] )
      for ( auto ch : c.gates()[id].children )
        if ( ++parents[ch] > 1 )
          return false;
  return true;
}

/// Number of gates of the tree obtained by unfolding, saturated at UINT64_MAX.
inline uint64_t unfolded_size( const circuit& c )
{
  constexpr auto cap = std::numeric_limits<uint64_t>::max();
  std::vector<uint64_t> s( c.num_gates(), 1 );
  for ( std::size_t id = 0; id < c.num_gates(); ++id )
    for ( auto ch : c.gates()[id].children )
      s[id] = s[ch] > cap - s[id] ? cap : s[id] + s[ch];
  return s.at( c.output() );
}

/// Duplicates shared subdags until every gate has at most one parent.
inline circuit unfold_to_formula( const circuit& c, uint64_t size_budget )
{
  const auto projected = unfolded_size( c );
  if ( projected > size_budget )
    throw budget_error( "unfolding needs " + std::to_string( projected ) + " gates, budget is " + std::to_string( size_budget ) );
  circuit out( c.arity() );
  auto copy = [&]( auto&& self, uint32_t id ) -> uint32_t {
    gate g = c[id];
    for ( auto& ch : g.children )
      ch = self( self, ch );
    return out.add_gate( std::move( g ) );
  };
  out.set_output( copy( copy, c.output() ) );
  return out;
}

} // namespace thrsyn
