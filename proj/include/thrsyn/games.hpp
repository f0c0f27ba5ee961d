#pragma once

#include <thrsyn/boolfn.hpp>
#include <thrsyn/circuit.hpp>
#include <thrsyn/circuit_io.hpp>
#include <thrsyn/common.hpp>
#include <thrsyn/protocol.hpp>

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace thrsyn
{

struct strategy_node
{
  bool terminal = false;
  uint32_t output = 0;
  bool output_bit = false;
  std::vector<uint32_t> children;

  friend bool operator==( const strategy_node&, const strategy_node& ) = default;
};

/// Ordered (k+1)-ary dag of a hypotheses-game strategy; terminals name the
/// coordinate Learner outputs.
struct strategy_light_form
{
  uint32_t k = 2;
  uint32_t n = 1;
  game_kind kind = game_kind::q;
  std::vector<strategy_node> nodes;
  uint32_t start = 0;

  uint32_t add_terminal( uint32_t coordinate, bool bit = false )
  {
    nodes.push_back( { true, coordinate, bit, {} } );
    return static_cast<uint32_t>( nodes.size() - 1 );
  }
  /// Children may be filled in later through `nodes[id].children`.
  uint32_t add_node( std::vector<uint32_t> children = {} )
  {
    nodes.push_back( { false, 0, false, std::move( children ) } );
    return static_cast<uint32_t>( nodes.size() - 1 );
  }

  friend bool operator==( const strategy_light_form&, const strategy_light_form& ) = default;
};

inline std::optional<diagnostic> validate( const strategy_light_form& s )
{
  auto fail = []( std::string code, std::string msg ) { return std::optional<diagnostic>( diagnostic{ std::move( code ), std::move( msg ) } ); };
  if ( s.k < 2 || s.n < 1 )
    return fail( "bad parameters", "need k >= 2 and n >= 1" );
  if ( s.start >= s.nodes.size() )
    return fail( "bad start", "starting node does not exist" );
  for ( std::size_t v = 0; v < s.nodes.size(); ++v )
  {
    const auto& node = s.nodes[v];
    if ( node.terminal )
    {
      if ( !node.children.empty() )
        return fail( "terminal with out-edges", "terminal " + std::to_string( v ) + " has children" );
      if ( node.output < 1 || node.output > s.n )
        return fail( "bad terminal label", "terminal " + std::to_string( v ) + " outputs coordinate " + std::to_string( node.output ) );
      continue;
    }
    if ( node.children.size() != s.k + 1 )
      return fail( "bad arity", "node " + std::to_string( v ) + " needs exactly k+1 = " + std::to_string( s.k + 1 ) + " children" );
    for ( auto c : node.children )
      if ( c >= s.nodes.size() )
        return fail( "dangling edge", "node " + std::to_string( v ) + " references a missing child" );
  }
  std::vector<uint8_t> state( s.nodes.size(), 0 );
  std::vector<std::pair<uint32_t, std::size_t>> stack{ { s.start, 0 } };
  state[s.start] = 1;
  while ( !stack.empty() )
  {
    auto& [v, next] = stack.back();
    if ( next == s.nodes[v].children.size() )
    {
      state[v] = 2;
      stack.pop_back();
      continue;
    }
    const auto w = s.nodes[v].children[next++];
    if ( state[w] == 1 )
      return fail( "cycle", "the strategy dag has a cycle through node " + std::to_string( w ) );
    if ( state[w] == 0 )
    {
      state[w] = 1;
      stack.emplace_back( w, 0 );
    }
  }
  return std::nullopt;
}

/// Learner's hypotheses at a play: k+1 subsets of the arena (positions in
/// f^{-1}(0)), given the current node and the sequence of Nature's answers.
using hypothesis_oracle = std::function<std::vector<index_set>( uint32_t node, std::span<const uint32_t> answers )>;

struct strategy
{
  strategy_light_form form;
  hypothesis_oracle hypotheses;
  /// When false, hypotheses depend on the node only, and plays are merged.
  bool path_dependent = false;
};

/// THR(k+1,2) per internal node, a variable or literal per terminal.
inline circuit lightform_to_circuit( const strategy_light_form& s )
{
  if ( auto d = validate( s ) )
    throw precondition_error( "invalid strategy: " + d->code + ": " + d->message );
  circuit c( s.n );
  std::vector<std::optional<uint32_t>> gate_of( s.nodes.size() );
  std::vector<std::pair<uint32_t, bool>> stack{ { s.start, false } };
  while ( !stack.empty() )
  {
    auto [v, expanded] = stack.back();
    stack.pop_back();
    if ( gate_of[v] )
      continue;
    const auto& node = s.nodes[v];
    if ( node.terminal )
    {
      if ( s.kind == game_kind::q || !node.output_bit )
        gate_of[v] = c.add_var( node.output );
      else
        gate_of[v] = c.add_lit( node.output, true );
      continue;
    }
    if ( expanded )
    {
      std::vector<uint32_t> children;
      for ( auto ch : node.children )
        children.push_back( *gate_of[ch] );
      gate_of[v] = c.add_thr( std::move( children ) );
      continue;
    }
    stack.emplace_back( v, true );
    for ( auto it = node.children.rbegin(); it != node.children.rend(); ++it )
      if ( !gate_of[*it] )
        stack.emplace_back( *it, false );
  }
  c.set_output( *gate_of[s.start] );
  return c;
}

struct winning_result
{
  bool winning = true;
  /// Nature's answers along the losing play, the node where it ends and the
  /// arena vector that breaks the rules there.
  std::vector<uint32_t> play;
  std::optional<uint32_t> node;
  std::optional<bit_vector> input;
  std::string reason;
  uint64_t states = 0;

  explicit operator bool() const { return winning; }
};

inline constexpr uint64_t default_state_budget = 10'000'000;

/// Walks every play of the game against every consistent hidden zero-input.
inline winning_result verify_winning( const strategy& s, const truth_table& f, uint64_t budget = default_state_budget )
{
  if ( auto d = validate( s.form ) )
    throw precondition_error( "invalid strategy: " + d->code + ": " + d->message );
  if ( f.arity() != s.form.n )
    throw precondition_error( "function arity differs from the strategy's" );
  const auto arena = f.zeros();
  const auto k = s.form.k;
  winning_result result;

  std::unordered_map<uint32_t, std::unordered_map<index_set, bool, index_set_hash>> done;
  std::vector<uint32_t> play;

  auto lose = [&]( uint32_t v, std::size_t z, std::string why ) {
    result.winning = false;
    result.play = play;
    result.node = v;
    result.input = arena[z];
    result.reason = std::move( why );
  };

  auto walk = [&]( auto&& self, uint32_t v, const index_set& zset ) -> bool {
    if ( !s.path_dependent )
    {
      auto& seen = done[v];
      if ( seen.count( zset ) )
        return true;
      seen.emplace( zset, true );
    }
    if ( ++result.states > budget )
      throw budget_error( "verify_winning: state budget of " + std::to_string( budget ) + " exceeded" );
    const auto& node = s.form.nodes[v];
    if ( node.terminal )
    {
      bool ok = true;
      zset.for_each( [&]( std::size_t z ) {
        if ( !ok )
          return;
        const bool bit = arena[z][node.output];
        if ( s.form.kind == game_kind::q ? bit : bit != node.output_bit )
        {
          ok = false;
          lose( v, z, "terminal output is wrong for this input" );
        }
      } );
      return ok;
    }
    const auto hyp = s.hypotheses( v, play );
    if ( hyp.size() != k + 1 )
      throw precondition_error( "hypothesis oracle must return k+1 sets" );
    bool ok = true;
    zset.for_each( [&]( std::size_t z ) {
      if ( !ok )
        return;
      uint32_t truths = 0;
      for ( const auto& h : hyp )
        truths += h.contains( z ) ? 1 : 0;
      if ( truths < k )
      {
        ok = false;
        lose( v, z, "fewer than k hypotheses hold" );
      }
    } );
    if ( !ok )
      return false;
    for ( uint32_t j = 0; j <= k; ++j )
    {
      const auto next = zset & hyp[j];
      if ( next.empty() )
        continue;
      play.push_back( j );
      if ( !self( self, node.children[j], next ) )
        return false;
      play.pop_back();
    }
    return true;
  };
  if ( !arena.empty() )
    walk( walk, s.form.start, index_set( arena.size(), true ) );
  return result;
}

/// Builds the communication protocol that descends a THR(k+1,2) circuit.
///
/// At every threshold gate each party in turn broadcasts, in w = ceil(log2(k+2))
/// big-endian bits, the 0-based index of its unique child that evaluates to 1
/// on its input, or the sentinel k+1 if there is none. The protocol then moves
/// to the smallest child nobody excluded.
inline protocol_dag circuit_to_protocol( const circuit& input, const truth_table& f, game_kind kind, uint32_t k )
{
  if ( k < 2 )
    throw precondition_error( "circuit_to_protocol requires k >= 2" );
  const auto c = prune( input );
  if ( c.arity() != f.arity() )
    throw precondition_error( "circuit arity differs from function arity" );
  if ( !basis_check( c, basis::threshold( k, kind == game_kind::r ) ) )
    throw precondition_error( "circuit must use only THR(" + std::to_string( k + 1 ) + ",2) gates and " +
                              ( kind == game_kind::r ? "literals" : "variables" ) );
  if ( auto l = leq( c, f ); !l )
    throw precondition_error( "circuit is not <= f: it outputs 1 on zero-input " + l.counterexample->str() );
  const auto member = kind == game_kind::q ? is_in_qk( f, k ) : is_in_rk( f, k );
  if ( !member )
  {
    std::string w;
    for ( const auto& x : member.witness )
      w += ( w.empty() ? "" : "," ) + x.str();
    throw precondition_error( std::string( "f is not in " ) + ( kind == game_kind::q ? "Q" : "R" ) + "_k; witness " + w );
  }

  protocol_dag p;
  p.graph.k = k;
  p.graph.n = f.arity();
  p.graph.kind = kind;
  p.arena = f.zeros();

  std::vector<std::vector<uint8_t>> values;
  for ( const auto& x : p.arena )
    values.push_back( evaluate_gates( c, x ) );

  const uint32_t width = ceil_log2( k + 2 );
  const uint32_t sentinel = k + 1;
  // code[gate][arena] : index broadcast at that gate
  std::unordered_map<uint32_t, std::vector<uint32_t>> code;
  auto codes_of = [&]( uint32_t g ) -> const std::vector<uint32_t>& {
    auto it = code.find( g );
    if ( it != code.end() )
      return it->second;
    std::vector<uint32_t> out( p.arena.size(), sentinel );
    const auto& children = c.gates()[g].children;
    for ( std::size_t a = 0; a < p.arena.size(); ++a )
    {
      uint32_t ones = 0, first = sentinel;
      for ( uint32_t j = 0; j < children.size(); ++j )
        if ( values[a][children[j]] )
        {
          if ( ones++ == 0 )
            first = j;
        }
      if ( !values[a][g] && ones > 1 )
        throw error( "threshold gate evaluates to 0 with two children at 1" );
      out[a] = ones == 1 ? first : sentinel;
    }
    return code.emplace( g, std::move( out ) ).first->second;
  };

  // Gadget nodes keyed by (gate, party, bit position, excluded mask, prefix).
  using key_t = std::tuple<uint32_t, uint32_t, uint32_t, uint32_t, uint32_t>;
  std::map<key_t, uint32_t> gadget;
  std::unordered_map<uint32_t, uint32_t> entry;
  struct pending_node
  {
    uint32_t gate, party, bit, excluded, prefix;
  };
  std::vector<std::pair<uint32_t, pending_node>> work;
  std::vector<std::optional<pending_node>> info;

  auto gate_entry = [&]( uint32_t g ) -> uint32_t {
    if ( auto it = entry.find( g ); it != entry.end() )
      return it->second;
    const auto& gt = c.gates()[g];
    uint32_t v;
    if ( gt.is_leaf() )
    {
      v = p.graph.add_terminal( gt.var, gt.kind == gate_kind::lit && gt.negated );
      info.push_back( std::nullopt );
    }
    else
    {
      v = p.graph.add_internal( 1 );
      pending_node pn{ g, 1, 0, 0, 0 };
      gadget[{ g, 1, 0, 0, 0 }] = v;
      info.push_back( pn );
      work.emplace_back( v, pn );
    }
    entry[g] = v;
    return v;
  };
  auto gadget_node = [&]( const pending_node& pn ) -> uint32_t {
    if ( pn.bit == 0 && pn.party == 1 && pn.excluded == 0 )
      return gate_entry( pn.gate );
    const key_t key{ pn.gate, pn.party, pn.bit, pn.excluded, pn.prefix };
    if ( auto it = gadget.find( key ); it != gadget.end() )
      return it->second;
    const auto v = p.graph.add_internal( pn.party );
    gadget[key] = v;
    info.push_back( pn );
    work.emplace_back( v, pn );
    return v;
  };

  p.graph.start = gate_entry( c.output() );
  while ( !work.empty() )
  {
    const auto [v, pn] = work.back();
    work.pop_back();
    const auto fanin = static_cast<uint32_t>( c.gates()[pn.gate].children.size() );
    for ( uint8_t b = 0; b < 2; ++b )
    {
      const auto prefix = pn.prefix * 2 + b;
      uint32_t target;
      if ( pn.bit + 1 < width )
        target = gadget_node( { pn.gate, pn.party, pn.bit + 1, pn.excluded, prefix } );
      else
      {
        auto excluded = pn.excluded;
        if ( prefix < fanin )
          excluded |= 1u << prefix;
        if ( pn.party < k )
          target = gadget_node( { pn.gate, pn.party + 1, 0, excluded, 0 } );
        else
        {
          uint32_t j = 0;
          while ( ( excluded >> j ) & 1u )
            ++j;
          target = gate_entry( c.gates()[pn.gate].children[j] );
        }
      }
      p.graph.add_edge( v, target, b );
    }
  }

  p.fill_messages( [&]( uint32_t v, const bit_vector& x ) {
    const auto& pn = *info[v];
    const auto a = *p.arena_index( x );
    const auto cd = codes_of( pn.gate )[a];
    return ( ( cd >> ( width - 1 - pn.bit ) ) & 1u ) != 0;
  } );
  return p;
}

/// Strategy light forms in the circuit JSON dialect.
inline json strategy_to_json( const strategy_light_form& s )
{
  json gates = json::array();
  for ( std::size_t v = 0; v < s.nodes.size(); ++v )
  {
    const auto& node = s.nodes[v];
    json j{ { "id", v } };
    if ( node.terminal )
    {
      j["kind"] = "terminal";
      j["output"] = node.output;
      if ( s.kind == game_kind::r )
        j["bit"] = node.output_bit ? 1 : 0;
    }
    else
    {
      j["kind"] = "node";
      j["children"] = node.children;
    }
    gates.push_back( std::move( j ) );
  }
  return json{ { "kind", "strategy" }, { "game", to_string( s.kind ) }, { "n", s.n },
               { "k", s.k },           { "output", s.start },           { "gates", std::move( gates ) } };
}

inline strategy_light_form strategy_from_json( const json& j )
{
  try
  {
    if ( j.value( "kind", "" ) != "strategy" )
      throw precondition_error( "strategy JSON must have kind \"strategy\"" );
    strategy_light_form s;
    s.n = j.at( "n" ).get<uint32_t>();
    s.k = j.at( "k" ).get<uint32_t>();
    s.kind = parse_game_kind( j.value( "game", "Q" ) );
    std::unordered_map<int64_t, uint32_t> position;
    for ( const auto& g : j.at( "gates" ) )
      if ( !position.emplace( g.at( "id" ).get<int64_t>(), static_cast<uint32_t>( position.size() ) ).second )
        throw precondition_error( "duplicate strategy node id" );
    auto lookup = [&]( const json& id ) {
      auto it = position.find( id.get<int64_t>() );
      if ( it == position.end() )
        throw precondition_error( "reference to unknown strategy node" );
      return it->second;
    };
    for ( const auto& g : j.at( "gates" ) )
    {
      if ( g.at( "kind" ).get<std::string>() == "terminal" )
        s.add_terminal( g.at( "output" ).get<uint32_t>(), g.value( "bit", 0 ) != 0 );
      else
      {
        std::vector<uint32_t> children;
        for ( const auto& ch : g.at( "children" ) )
          children.push_back( lookup( ch ) );
        s.add_node( std::move( children ) );
      }
    }
    s.start = lookup( j.at( "output" ) );
    return s;
  }
  catch ( const json::exception& e )
  {
    throw precondition_error( std::string( "malformed strategy JSON: " ) + e.what() );
  }
}

} // namespace thrsyn
