#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace thrsyn;

TEST( Batcher, SmallCases )
{
  EXPECT_TRUE( batcher_network( 1 ).layers.empty() );
  const auto net = batcher_network( 4 );
  for ( uint64_t x = 0; x < 16; ++x )
    EXPECT_TRUE( oracle::sorted_descending( net, x ) ) << x;
}

TEST( Batcher, ZeroOnePrincipleExhaustive )
{
  for ( uint32_t m = 1; m <= 12; ++m )
  {
    const auto net = batcher_network( m );
    for ( uint64_t x = 0; x < ( uint64_t{ 1 } << m ); ++x )
      ASSERT_TRUE( oracle::sorted_descending( net, x ) ) << "m=" << m << " x=" << x;
    for ( const auto& layer : net.layers )
    {
      std::vector<int> used( m + 1, 0 );
      for ( auto [i, j] : layer )
      {
        ASSERT_LT( i, j );
        ASSERT_LE( j, m );
        ASSERT_EQ( used[i]++ + used[j]++, 0 ) << "layer reuses a wire";
      }
    }
  }
}

TEST( Batcher, SampledLargeNetwork )
{
  const auto net = batcher_network( 33 );
  rng gen( 2024 );
  for ( int t = 0; t < 10000; ++t )
    ASSERT_TRUE( oracle::sorted_descending( net, gen.next() & ( ( uint64_t{ 1 } << 33 ) - 1 ) ) );
  for ( uint32_t i = 0; i < 33; ++i )
    for ( uint32_t j = i; j < 33; ++j )
      ASSERT_TRUE( oracle::sorted_descending( net, ( uint64_t{ 1 } << i ) | ( uint64_t{ 1 } << j ) ) );
  ASSERT_TRUE( oracle::sorted_descending( net, 0 ) );
}

TEST( MonotoneCircuit, Examples )
{
  EXPECT_EQ( to_truth_table( network_to_monotone_circuit( batcher_network( 3 ), 2 ) ), maj( 3 ) );
  EXPECT_EQ( to_truth_table( network_to_monotone_circuit( batcher_network( 5 ), 3 ) ), maj( 5 ) );
  EXPECT_EQ( to_truth_table( network_to_monotone_circuit( batcher_network( 2 ), 1 ) ), thr( 2, 1 ) );
  EXPECT_THROW( network_to_monotone_circuit( batcher_network( 2 ), 3 ), precondition_error );
}

TEST( MonotoneCircuit, MedianIsMajority )
{
  for ( uint32_t m = 1; m <= 13; m += 2 )
  {
    const auto net = batcher_network( m );
    const auto c = batcher_majority( m );
    EXPECT_EQ( to_truth_table( c ), maj( m ) ) << m;
    EXPECT_TRUE( basis_check( c, basis::monotone() ) );
    EXPECT_LE( depth( c ), 2 * net.layers.size() );
  }
  for ( uint32_t m = 2; m <= 8; ++m )
    for ( uint32_t w = 1; w <= m; ++w )
      EXPECT_EQ( to_truth_table( network_to_monotone_circuit( batcher_network( m ), w ) ), thr( m, w ) );
}

TEST( DivideAndConquer, Examples )
{
  const auto one = dnc_threshold_formula( 1, 1 );
  EXPECT_EQ( one.num_gates(), 1u );
  EXPECT_EQ( one.gates()[0].kind, gate_kind::var );
  EXPECT_EQ( to_truth_table( dnc_threshold_formula( 3, 2 ) ), maj( 3 ) );
  EXPECT_EQ( to_truth_table( dnc_threshold_formula( 5, 3 ) ), maj( 5 ) );
}

TEST( DivideAndConquer, AllSmallThresholds )
{
  for ( uint32_t b = 1; b <= 12; ++b )
    for ( uint32_t a = 1; a <= b; ++a )
    {
      const auto c = dnc_threshold_formula( b, a );
      ASSERT_EQ( to_truth_table( c ), thr( b, a ) ) << b << " " << a;
      ASSERT_TRUE( is_formula( c ) );
      ASSERT_TRUE( basis_check( c, basis::monotone() ) );
    }
  EXPECT_THROW( dnc_threshold_formula( 40, 20, 1000 ), budget_error );
}

TEST( NetworkText, RoundTrip )
{
  const auto net = batcher_network( 7 );
  const auto text = network_to_text( net );
  EXPECT_EQ( text.substr( 0, 4 ), "m=7\n" );
  EXPECT_EQ( network_from_text( text ), net );
  EXPECT_THROW( network_from_text( "m=3\n1:2 2:3\n" ), precondition_error );
  EXPECT_THROW( network_from_text( "m=3\n2:1\n" ), precondition_error );
  EXPECT_THROW( network_from_text( "3\n" ), precondition_error );
}
