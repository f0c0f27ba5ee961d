#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace thrsyn;

namespace
{

bit_vector bv( const char* s ) { return bit_vector::parse( s ); }

circuit maj3_circuit()
{
  circuit c( 3 );
  c.set_output( c.add_maj3( c.add_var( 1 ), c.add_var( 2 ), c.add_var( 3 ) ) );
  return c;
}

/// First gadget node: a node whose first two children are terminals.
std::optional<uint32_t> first_gadget( const strategy_light_form& s )
{
  for ( uint32_t v = 0; v < s.nodes.size(); ++v )
  {
    const auto& node = s.nodes[v];
    if ( !node.terminal && s.nodes[node.children[0]].terminal && s.nodes[node.children[1]].terminal &&
         s.nodes[node.children[0]].output != s.nodes[node.children[1]].output )
      return v;
  }
  return std::nullopt;
}

} // namespace

TEST( LightformToCircuit, Examples )
{
  strategy_light_form one;
  one.n = 3;
  one.start = one.add_terminal( 2 );
  const auto c = lightform_to_circuit( one );
  ASSERT_EQ( size( c ), 1u );
  EXPECT_EQ( c.gates()[c.output()].kind, gate_kind::var );
  EXPECT_EQ( c.gates()[c.output()].var, 2u );

  strategy_light_form three;
  three.n = 3;
  three.start = three.add_node( { three.add_terminal( 1 ), three.add_terminal( 2 ), three.add_terminal( 3 ) } );
  const auto m = lightform_to_circuit( three );
  EXPECT_EQ( to_truth_table( m ), maj( 3 ) );
  EXPECT_EQ( depth( m ), 1u );
  EXPECT_TRUE( basis_check( m, basis::maj3() ) );

  strategy_light_form r;
  r.n = 2;
  r.kind = game_kind::r;
  r.start = r.add_terminal( 2, true );
  const auto lit = lightform_to_circuit( r );
  const auto& g = lit.gates()[lit.output()];
  EXPECT_EQ( g.kind, gate_kind::lit );
  EXPECT_EQ( g.var, 2u );
  EXPECT_TRUE( g.negated );
  EXPECT_FALSE( evaluate( lit, bv( "01" ) ) );
}

TEST( LightformToCircuit, RejectsMalformed )
{
  strategy_light_form bad;
  bad.n = 3;
  bad.start = bad.add_node( { 0, 0, 0 } );
  EXPECT_THROW( lightform_to_circuit( bad ), precondition_error );
  strategy_light_form arity;
  arity.n = 3;
  arity.start = arity.add_node( { arity.add_terminal( 1 ), arity.add_terminal( 2 ) } );
  EXPECT_EQ( validate( arity )->code, "bad arity" );
}

TEST( VerifyWinning, Examples )
{
  truth_table f( 3 );
  for ( uint64_t x = 1; x < 8; ++x )
    f.set( x, true );
  strategy trivial;
  trivial.form.n = 3;
  trivial.form.start = trivial.form.add_terminal( 1 );
  EXPECT_TRUE( verify_winning( trivial, f ).winning );

  auto s = theorem1_strategy( 2, batcher_majority( 5 ) );
  EXPECT_TRUE( verify_winning( s, maj( 5 ) ).winning );

  const auto g = first_gadget( s.form );
  ASSERT_TRUE( g.has_value() );
  auto& kids = s.form.nodes[*g].children;
  std::swap( s.form.nodes[kids[0]].output, s.form.nodes[kids[1]].output );
  const auto lost = verify_winning( s, maj( 5 ) );
  ASSERT_FALSE( lost.winning );
  EXPECT_FALSE( lost.play.empty() );
  ASSERT_TRUE( lost.input.has_value() );
  EXPECT_FALSE( maj( 5 )( *lost.input ) );
  EXPECT_TRUE( s.form.nodes[*lost.node].terminal );
  EXPECT_TRUE( ( *lost.input )[s.form.nodes[*lost.node].output] );
}

TEST( VerifyWinning, TooFewTrueHypothesesLoses )
{
  strategy s;
  s.form.n = 3;
  s.form.start = s.form.add_node( { s.form.add_terminal( 1 ), s.form.add_terminal( 2 ), s.form.add_terminal( 3 ) } );
  const auto arena = maj( 3 ).zeros();
  s.hypotheses = [&]( uint32_t, std::span<const uint32_t> ) {
    return std::vector<index_set>{ index_set( arena.size() ), index_set( arena.size() ), index_set( arena.size(), true ) };
  };
  const auto r = verify_winning( s, maj( 3 ) );
  EXPECT_FALSE( r.winning );
  EXPECT_EQ( r.reason, "fewer than k hypotheses hold" );
}

TEST( VerifyWinning, MatchesHonestMaj3Strategy )
{
  // Hypothesis j: z_{j+1} = 0. Any zero of maj(3) has at most one 1.
  strategy s;
  s.form.n = 3;
  s.form.start = s.form.add_node( { s.form.add_terminal( 1 ), s.form.add_terminal( 2 ), s.form.add_terminal( 3 ) } );
  const auto arena = maj( 3 ).zeros();
  s.hypotheses = [&]( uint32_t, std::span<const uint32_t> ) {
    std::vector<index_set> h;
    for ( uint32_t j = 1; j <= 3; ++j )
    {
      index_set set( arena.size() );
      for ( std::size_t a = 0; a < arena.size(); ++a )
        if ( !arena[a][j] )
          set.insert( a );
      h.push_back( set );
    }
    return h;
  };
  s.path_dependent = true;
  EXPECT_TRUE( verify_winning( s, maj( 3 ) ).winning );
  EXPECT_FALSE( verify_winning( s, thr( 3, 3 ) ).winning );
}

TEST( VerifyWinning, WinningStrategiesGiveCircuitsBelowF )
{
  for ( uint32_t n = 1; n <= 3; ++n )
  {
    const auto f = maj( 2 * n + 1 );
    for ( const auto& base : { batcher_majority( 2 * n + 1 ), dnc_threshold_formula( 2 * n + 1, n + 1 ) } )
    {
      const auto s = theorem1_strategy( n, base );
      ASSERT_TRUE( verify_winning( s, f ).winning ) << n;
      const auto c = lightform_to_circuit( s.form );
      EXPECT_TRUE( leq( c, f ).holds );
      EXPECT_TRUE( oracle::below( c, f ) );
    }
  }
  const auto amp = lemma2_sample( 1, 2, 3, 50 );
  ASSERT_TRUE( amp.tree.has_value() );
  const auto s = theorem2_strategy( 1, dnc_threshold_formula( 3, 2 ), *amp.tree );
  ASSERT_TRUE( verify_winning( s, maj( 3 ) ).winning );
  EXPECT_TRUE( oracle::below( lightform_to_circuit( s.form ), maj( 3 ) ) );
}

TEST( CircuitToProtocol, Maj3Example )
{
  const auto p = circuit_to_protocol( maj3_circuit(), maj( 3 ), game_kind::q, 2 );
  EXPECT_FALSE( validate( p ).has_value() );
  const std::vector<bit_vector> in{ bv( "100" ), bv( "010" ) };
  EXPECT_EQ( simulate( p, in ).output, 3u );
  EXPECT_TRUE( computes_game( p, maj( 3 ) ).holds );
  EXPECT_TRUE( oracle::computes( p, maj( 3 ) ) );
}

TEST( CircuitToProtocol, SingleVariable )
{
  truth_table f( 2 );
  f.set( 1, true );
  f.set( 3, true );
  circuit c( 2 );
  c.set_output( c.add_var( 1 ) );
  const auto p = circuit_to_protocol( c, f, game_kind::q, 2 );
  ASSERT_EQ( size( p ), 1u );
  EXPECT_TRUE( p.graph.nodes[p.graph.start].terminal );
  EXPECT_EQ( p.graph.nodes[p.graph.start].label, 1u );
}

TEST( CircuitToProtocol, Preconditions )
{
  circuit x1( 3 );
  x1.set_output( x1.add_var( 1 ) );
  EXPECT_THROW( circuit_to_protocol( x1, maj( 3 ), game_kind::q, 2 ), precondition_error );
  EXPECT_THROW( circuit_to_protocol( batcher_majority( 3 ), maj( 3 ), game_kind::q, 2 ), precondition_error );
  EXPECT_THROW( circuit_to_protocol( maj3_circuit(), maj( 3 ), game_kind::q, 3 ), precondition_error );
}

TEST( CircuitToProtocol, CoverTreeMaj5Computes )
{
  const auto c = theorem1_circuit( 2, batcher_majority( 5 ) );
  const auto p = circuit_to_protocol( c, maj( 5 ), game_kind::q, 2 );
  EXPECT_FALSE( validate( p ).has_value() );
  const auto r = computes_game( p, maj( 5 ) );
  EXPECT_TRUE( r.holds );
  EXPECT_EQ( r.evaluations, 16u * 16u );
  EXPECT_TRUE( oracle::computes( p, maj( 5 ) ) );
  const auto w = ceil_log2( 2 + 2 );
  EXPECT_LE( depth( p ), ( 1 + 2 * w ) * depth( c ) + 2 );
}

TEST( CircuitToProtocol, RGameWithLiterals )
{
  // f = NOT x1: the zeros 10 and 11 agree on x1 = 1.
  truth_table f( 2 );
  f.set( 0, true );
  f.set( 2, true );
  circuit c( 2 );
  c.set_output( c.add_thr( { c.add_lit( 1, true ), c.add_lit( 1, true ), c.add_var( 2 ) } ) );
  const auto p = circuit_to_protocol( c, f, game_kind::r, 2 );
  EXPECT_EQ( p.graph.kind, game_kind::r );
  EXPECT_TRUE( computes_game( p, f ).holds );
  for ( const auto& x : p.arena )
    for ( const auto& y : p.arena )
    {
      const std::vector<bit_vector> xy{ x, y };
      const auto t = simulate( p, xy );
      EXPECT_EQ( t.output, 1u );
      EXPECT_TRUE( t.output_bit );
    }
  EXPECT_THROW( circuit_to_protocol( c, f, game_kind::q, 2 ), precondition_error );
}

TEST( CircuitToProtocol, DepthBoundAndCorrectnessOnThresholdCircuits )
{
  for ( auto [k, n] : { std::pair{ 2u, 1u }, { 2u, 2u }, { 3u, 1u }, { 4u, 1u } } )
  {
    const auto f = thr( k * n + 1, n + 1 );
    const auto c = theorem3_circuit( k, n ).c;
    const auto p = circuit_to_protocol( c, f, game_kind::q, k );
    EXPECT_TRUE( computes_game( p, f ).holds );
    EXPECT_LE( depth( p ), ( 1 + k * ceil_log2( k + 2 ) ) * depth( c ) + 2 );
  }
}

TEST( StrategyJson, RoundTrip )
{
  const auto s = theorem1_strategy( 1, dnc_threshold_formula( 3, 2 ) ).form;
  const auto j = strategy_to_json( s );
  EXPECT_EQ( j["kind"], "strategy" );
  EXPECT_EQ( strategy_from_json( j ), s );
  EXPECT_EQ( strategy_to_json( strategy_from_json( j ) ).dump(), j.dump() );
  EXPECT_THROW( strategy_from_json( json{ { "kind", "circuit" } } ), precondition_error );
}
