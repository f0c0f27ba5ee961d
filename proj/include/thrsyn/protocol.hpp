#pragma once

#include <thrsyn/boolfn.hpp>
#include <thrsyn/common.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace thrsyn
{

/// A node of a protocol dag. Non-terminals are owned by a party in [1, k];
/// terminals carry the output: a coordinate (Q games) or a coordinate with
/// the agreed bit (R games).
struct protocol_node
{
  bool terminal = false;
  uint32_t owner = 0;
  uint32_t label = 0;
  bool label_bit = false;

  friend bool operator==( const protocol_node&, const protocol_node& ) = default;
};

struct protocol_edge
{
  uint32_t from = 0;
  uint32_t to = 0;
  uint8_t label = 0;

  friend bool operator==( const protocol_edge&, const protocol_edge& ) = default;
};

/// The communication skeleton: ordered 2-ary dag, ownership partition and
/// terminal labels, without any message functions. Parallel edges are allowed.
struct light_form
{
  uint32_t k = 2;
  uint32_t n = 1;
  game_kind kind = game_kind::q;
  std::vector<protocol_node> nodes;
  std::vector<protocol_edge> edges;
  uint32_t start = 0;

  uint32_t add_terminal( uint32_t coordinate, bool bit = false )
  {
    nodes.push_back( { true, 0, coordinate, bit } );
    return static_cast<uint32_t>( nodes.size() - 1 );
  }
  uint32_t add_internal( uint32_t party )
  {
    nodes.push_back( { false, party, 0, false } );
    return static_cast<uint32_t>( nodes.size() - 1 );
  }
  void add_edge( uint32_t from, uint32_t to, uint8_t label ) { edges.push_back( { from, to, label } ); }

  friend bool operator==( const light_form&, const light_form& ) = default;
};

/// A full protocol: light form plus explicit message tables over the arena.
///
/// `arena` enumerates the admissible inputs (the zeros of the target function
/// in ascending table-index order). `messages[i-1][v]` lists the bit party i
/// sends at node v for every arena position; it is empty for nodes party i
/// does not own.
struct protocol_dag
{
  light_form graph;
  std::vector<bit_vector> arena;
  std::vector<std::vector<std::vector<uint8_t>>> messages;

  /// Position of x in the arena, if present.
  std::optional<std::size_t> arena_index( const bit_vector& x ) const
  {
    auto it = std::lower_bound( arena.begin(), arena.end(), x, []( const bit_vector& a, const bit_vector& b ) { return a.bits < b.bits; } );
    if ( it == arena.end() || it->bits != x.bits || it->n != x.n )
      return std::nullopt;
    return static_cast<std::size_t>( it - arena.begin() );
  }

  bool message( uint32_t node, std::size_t arena_pos ) const
  {
    return messages[graph.nodes[node].owner - 1][node][arena_pos];
  }

  /// Fills every message table from `rule(node, x)`.
  void fill_messages( const std::function<bool( uint32_t, const bit_vector& )>& rule )
  {
    messages.assign( graph.k, std::vector<std::vector<uint8_t>>( graph.nodes.size() ) );
    for ( uint32_t v = 0; v < graph.nodes.size(); ++v )
    {
      const auto& node = graph.nodes[v];
      if ( node.terminal )
        continue;
      auto& table = messages[node.owner - 1][v];
      table.resize( arena.size() );
      for ( std::size_t a = 0; a < arena.size(); ++a )
        table[a] = rule( v, arena[a] ) ? 1 : 0;
    }
  }
};

struct diagnostic
{
  std::string code;
  std::string message;
};

/// Checks the structural invariants of a light form; the first violation found
/// is returned. Codes: "bad parameters", "bad start", "dangling edge",
/// "terminal with out-edges", "bad edge label", "duplicate edge label",
/// "missing edge", "partition gap", "bad owner", "bad terminal label",
/// "cycle", "unreachable node".
inline std::optional<diagnostic> validate( const light_form& lf )
{
  auto fail = []( std::string code, std::string msg ) { return std::optional<diagnostic>( diagnostic{ std::move( code ), std::move( msg ) } ); };
  const auto nv = lf.nodes.size();
  if ( lf.k < 2 || lf.n < 1 || lf.n > 64 )
    return fail( "bad parameters", "need k >= 2 and 1 <= n <= 64" );
  if ( nv == 0 || lf.start >= nv )
    return fail( "bad start", "starting node " + std::to_string( lf.start ) + " does not exist" );

  std::vector<std::array<int64_t, 2>> out( nv, { -1, -1 } );
  for ( std::size_t e = 0; e < lf.edges.size(); ++e )
  {
    const auto& edge = lf.edges[e];
    if ( edge.from >= nv || edge.to >= nv )
      return fail( "dangling edge", "edge " + std::to_string( e ) + " references a missing node" );
    if ( lf.nodes[edge.from].terminal )
      return fail( "terminal with out-edges", "terminal " + std::to_string( edge.from ) + " has an out-edge" );
    if ( edge.label > 1 )
      return fail( "bad edge label", "edge " + std::to_string( e ) + " has label " + std::to_string( edge.label ) );
    if ( out[edge.from][edge.label] >= 0 )
      return fail( "duplicate edge label",
                   "node " + std::to_string( edge.from ) + " has two out-edges labeled " + std::to_string( edge.label ) );
    out[edge.from][edge.label] = edge.to;
  }
  for ( std::size_t v = 0; v < nv; ++v )
  {
    const auto& node = lf.nodes[v];
    if ( node.terminal )
    {
      if ( node.label < 1 || node.label > lf.n )
        return fail( "bad terminal label", "terminal " + std::to_string( v ) + " outputs coordinate " + std::to_string( node.label ) );
      continue;
    }
    if ( out[v][0] < 0 || out[v][1] < 0 )
      return fail( "missing edge", "non-terminal " + std::to_string( v ) + " needs out-edges labeled 0 and 1" );
    if ( node.owner == 0 )
      return fail( "partition gap", "non-terminal " + std::to_string( v ) + " is not assigned to any party" );
    if ( node.owner > lf.k )
      return fail( "bad owner", "node " + std::to_string( v ) + " is owned by party " + std::to_string( node.owner ) );
  }

  // Cycle and reachability check by iterative DFS from the start node.
  std::vector<uint8_t> state( nv, 0 );
  std::vector<std::pair<uint32_t, int>> stack{ { lf.start, 0 } };
  state[lf.start] = 1;
  while ( !stack.empty() )
  {
    auto& [v, next] = stack.back();
    if ( lf.nodes[v].terminal || next == 2 )
    {
      state[v] = 2;
      stack.pop_back();
      continue;
    }
    const auto w = static_cast<uint32_t>( out[v][next++] );
    if ( state[w] == 1 )
      return fail( "cycle", "the dag has a cycle through node " + std::to_string( w ) );
    if ( state[w] == 0 )
    {
      state[w] = 1;
      stack.emplace_back( w, 0 );
    }
  }
  for ( std::size_t v = 0; v < nv; ++v )
    if ( state[v] == 0 )
      return fail( "unreachable node", "node " + std::to_string( v ) + " is not a descendant of the starting node" );
  return std::nullopt;
}

/// Light-form checks plus arena ordering and message-table totality.
inline std::optional<diagnostic> validate( const protocol_dag& p )
{
  if ( auto d = validate( p.graph ) )
    return d;
  for ( std::size_t a = 0; a < p.arena.size(); ++a )
  {
    if ( p.arena[a].n != p.graph.n )
      return diagnostic{ "arena arity", "arena vector " + std::to_string( a ) + " has the wrong arity" };
    if ( a > 0 && p.arena[a - 1].bits >= p.arena[a].bits )
      return diagnostic{ "arena order", "arena must be strictly ascending in table-index order" };
  }
  if ( p.messages.size() != p.graph.k )
    return diagnostic{ "message gap", "need one message table set per party" };
  for ( uint32_t i = 0; i < p.graph.k; ++i )
  {
    if ( p.messages[i].size() != p.graph.nodes.size() )
      return diagnostic{ "message gap", "party " + std::to_string( i + 1 ) + " has tables for the wrong node count" };
    for ( std::size_t v = 0; v < p.graph.nodes.size(); ++v )
    {
      const auto& node = p.graph.nodes[v];
      const bool owns = !node.terminal && node.owner == i + 1;
      const auto& table = p.messages[i][v];
      if ( owns && table.size() != p.arena.size() )
        return diagnostic{ "message gap", "party " + std::to_string( i + 1 ) + " lacks a total table at node " + std::to_string( v ) };
      if ( !owns && !table.empty() )
        return diagnostic{ "message gap", "party " + std::to_string( i + 1 ) + " has a table at node " + std::to_string( v ) + " it does not own" };
      for ( auto b : table )
        if ( b > 1 )
          return diagnostic{ "message gap", "message tables may only hold bits" };
    }
  }
  return std::nullopt;
}

/// Successor per (node, edge label); requires a valid light form.
inline std::vector<std::array<uint32_t, 2>> successor_table( const light_form& lf )
{
  if ( auto d = validate( lf ) )
    throw precondition_error( "invalid protocol: " + d->code + ": " + d->message );
  std::vector<std::array<uint32_t, 2>> next( lf.nodes.size(), { 0, 0 } );
  for ( const auto& e : lf.edges )
    next[e.from][e.label] = e.to;
  return next;
}

/// Nodes in an order where every edge goes forward, starting with `start`.
inline std::vector<uint32_t> topological_order( const light_form& lf )
{
  const auto next = successor_table( lf );
  std::vector<uint32_t> indegree( lf.nodes.size(), 0 );
  for ( const auto& e : lf.edges )
    ++indegree[e.to];
  std::vector<uint32_t> order{ lf.start };
  for ( std::size_t i = 0; i < order.size(); ++i )
  {
    const auto v = order[i];
    if ( lf.nodes[v].terminal )
      continue;
    for ( auto w : next[v] )
      if ( --indegree[w] == 0 )
        order.push_back( w );
  }
  return order;
}

/// Depth of every node: longest path length from the start node.
inline std::vector<uint32_t> node_depths( const light_form& lf )
{
  const auto next = successor_table( lf );
  std::vector<uint32_t> d( lf.nodes.size(), 0 );
  for ( auto v : topological_order( lf ) )
    if ( !lf.nodes[v].terminal )
      for ( auto w : next[v] )
        d[w] = std::max( d[w], d[v] + 1 );
  return d;
}

inline uint32_t depth( const light_form& lf )
{
  const auto d = node_depths( lf );
  return *std::max_element( d.begin(), d.end() );
}

inline std::size_t size( const light_form& lf ) { return lf.nodes.size(); }
inline uint32_t depth( const protocol_dag& p ) { return depth( p.graph ); }
inline std::size_t size( const protocol_dag& p ) { return p.graph.nodes.size(); }

/// Drops the message tables and the arena.
inline light_form get_light_form( const protocol_dag& p ) { return p.graph; }

struct transcript
{
  std::vector<protocol_edge> path;
  uint32_t terminal = 0;
  uint32_t output = 0;
  bool output_bit = false;
};

namespace detail
{

inline std::vector<std::size_t> arena_positions( const protocol_dag& p, std::span<const bit_vector> inputs )
{
  if ( inputs.size() != p.graph.k )
    throw precondition_error( "need exactly k = " + std::to_string( p.graph.k ) + " inputs" );
  std::vector<std::size_t> pos;
  for ( const auto& x : inputs )
  {
    auto a = p.arena_index( x );
    if ( !a )
      throw precondition_error( "input " + x.str() + " is not in the protocol arena" );
    pos.push_back( *a );
  }
  return pos;
}

/// Walks the protocol for arena positions `pos`; returns the terminal reached.
inline uint32_t walk( const protocol_dag& p, const std::vector<std::array<uint32_t, 2>>& next, std::span<const std::size_t> pos,
                      std::vector<protocol_edge>* path = nullptr )
{
  auto v = p.graph.start;
  for ( std::size_t steps = 0; !p.graph.nodes[v].terminal; ++steps )
  {
    if ( steps > p.graph.nodes.size() )
      throw error( "protocol walk did not terminate" );
    const auto owner = p.graph.nodes[v].owner;
    const uint8_t bit = p.messages[owner - 1][v][pos[owner - 1]];
    if ( path )
      path->push_back( { v, next[v][bit], bit } );
    v = next[v][bit];
  }
  return v;
}

inline bool relation_holds( const light_form& lf, uint32_t terminal, std::span<const bit_vector> tuple )
{
  const auto& node = lf.nodes[terminal];
  for ( const auto& x : tuple )
  {
    const bool bit = x[node.label];
    if ( lf.kind == game_kind::q ? bit : bit != node.label_bit )
      return false;
  }
  return true;
}

inline void require_arena( const protocol_dag& p, const truth_table& f )
{
  if ( f.arity() != p.graph.n )
    throw precondition_error( "function arity differs from protocol input length" );
  const auto zeros = f.zeros();
  if ( zeros != p.arena )
    throw precondition_error( "protocol arena is not the zero-set of the target function" );
}

} // namespace detail

/// Runs the protocol on one input per party.
inline transcript simulate( const protocol_dag& p, std::span<const bit_vector> inputs )
{
  const auto pos = detail::arena_positions( p, inputs );
  const auto next = successor_table( p.graph );
  transcript t;
  t.terminal = detail::walk( p, next, pos, &t.path );
  t.output = p.graph.nodes[t.terminal].label;
  t.output_bit = p.graph.nodes[t.terminal].label_bit;
  return t;
}

/// Nodes v such that x is `party`-compatible with some path from the start to v.
inline std::vector<uint8_t> compatible_nodes( const protocol_dag& p, std::size_t arena_pos, uint32_t party )
{
  const auto next = successor_table( p.graph );
  std::vector<uint8_t> seen( p.graph.nodes.size(), 0 );
  std::vector<uint32_t> stack{ p.graph.start };
  seen[p.graph.start] = 1;
  while ( !stack.empty() )
  {
    const auto v = stack.back();
    stack.pop_back();
    const auto& node = p.graph.nodes[v];
    if ( node.terminal )
      continue;
    for ( uint8_t b = 0; b < 2; ++b )
    {
      if ( node.owner == party && p.messages[party - 1][v][arena_pos] != b )
        continue;
      const auto w = next[v][b];
      if ( !seen[w] )
      {
        seen[w] = 1;
        stack.push_back( w );
      }
    }
  }
  return seen;
}

inline std::vector<uint8_t> compatible_nodes( const protocol_dag& p, const bit_vector& x, uint32_t party )
{
  auto a = p.arena_index( x );
  if ( !a )
    throw precondition_error( "input " + x.str() + " is not in the protocol arena" );
  if ( party < 1 || party > p.graph.k )
    throw precondition_error( "party index out of range" );
  return compatible_nodes( p, *a, party );
}

struct game_check_result
{
  bool holds = true;
  /// Violating input tuple (computes) or the single offending input (strong).
  std::vector<bit_vector> inputs;
  std::optional<uint32_t> terminal;
  std::optional<uint32_t> party;
  uint64_t evaluations = 0;

  explicit operator bool() const { return holds; }
};

/// Exhaustively checks that every k-tuple of arena inputs reaches a terminal
/// whose label answers the game (common zero for Q, agreed bit for R).
inline game_check_result computes_game( const protocol_dag& p, const truth_table& f, uint64_t budget = default_tuple_budget )
{
  detail::require_arena( p, f );
  if ( auto d = validate( p ) )
    throw precondition_error( "invalid protocol: " + d->code + ": " + d->message );
  game_check_result result;
  if ( p.arena.empty() )
    return result;
  const auto k = p.graph.k;
  const auto next = successor_table( p.graph );
  std::vector<std::size_t> pos( k, 0 );
  std::vector<bit_vector> tuple( k );
  while ( true )
  {
    if ( ++result.evaluations > budget )
      throw budget_error( "computes_game: tuple budget of " + std::to_string( budget ) + " exceeded" );
    const auto t = detail::walk( p, next, pos );
    for ( uint32_t i = 0; i < k; ++i )
      tuple[i] = p.arena[pos[i]];
    if ( !detail::relation_holds( p.graph, t, tuple ) )
    {
      result.holds = false;
      result.inputs = tuple;
      result.terminal = t;
      return result;
    }
    uint32_t i = 0;
    while ( i < k && ++pos[i] == p.arena.size() )
      pos[i++] = 0;
    if ( i == k )
      break;
  }
  return result;
}

/// Checks strong computation: whenever an arena input x is i-compatible with a
/// terminal t, x itself already satisfies t's label.
inline game_check_result strongly_computes( const protocol_dag& p, const truth_table& f )
{
  detail::require_arena( p, f );
  if ( auto d = validate( p ) )
    throw precondition_error( "invalid protocol: " + d->code + ": " + d->message );
  game_check_result result;
  for ( std::size_t a = 0; a < p.arena.size(); ++a )
    for ( uint32_t party = 1; party <= p.graph.k; ++party )
    {
      const auto seen = compatible_nodes( p, a, party );
      ++result.evaluations;
      for ( uint32_t v = 0; v < seen.size(); ++v )
      {
        if ( !seen[v] || !p.graph.nodes[v].terminal )
          continue;
        const bit_vector single[1] = { p.arena[a] };
        if ( !detail::relation_holds( p.graph, v, single ) )
        {
          result.holds = false;
          result.inputs = { p.arena[a] };
          result.terminal = v;
          result.party = party;
          return result;
        }
      }
    }
  return result;
}

} // namespace thrsyn
