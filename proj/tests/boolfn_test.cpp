#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace thrsyn;

namespace
{

bit_vector bv( const char* s ) { return bit_vector::parse( s ); }

} // namespace

TEST( BitVector, ParseReadsCoordinateOneFirst )
{
  const auto x = bv( "100" );
  EXPECT_TRUE( x[1] );
  EXPECT_FALSE( x[2] );
  EXPECT_EQ( x.bits, 1u );
  EXPECT_EQ( x.str(), "100" );
  EXPECT_EQ( bv( "011" ).negated().str(), "100" );
  EXPECT_THROW( bv( "10x" ), precondition_error );
}

TEST( Threshold, Examples )
{
  EXPECT_TRUE( thr( 3, 2 )( bv( "011" ) ) );
  EXPECT_FALSE( thr( 3, 2 )( bv( "100" ) ) );
  EXPECT_EQ( thr( 7, 3 ).count_zeros(), 29u );
  EXPECT_EQ( thr( 7, 3 ).zeros().size(), 29u );
  EXPECT_THROW( thr( 3, 0 ), precondition_error );
  EXPECT_THROW( thr( 3, 4 ), precondition_error );
}

TEST( Threshold, MatchesPopcountOracle )
{
  for ( uint32_t b = 1; b <= 12; ++b )
    for ( uint32_t a = 1; a <= b; ++a )
    {
      const auto f = thr( b, a );
      for ( uint64_t x = 0; x < f.size(); ++x )
        ASSERT_EQ( f.get( x ), oracle::thr_bit( x, a ) ) << b << " " << a << " " << x;
    }
}

TEST( Majority, Examples )
{
  EXPECT_TRUE( maj( 3 )( bv( "110" ) ) );
  EXPECT_FALSE( maj( 3 )( bv( "001" ) ) );
  EXPECT_EQ( maj( 5 ), thr( 5, 3 ) );
  EXPECT_THROW( maj( 4 ), precondition_error );
}

TEST( TruthTable, TextRoundTrip )
{
  const auto f = thr( 5, 2 );
  const auto text = f.to_text();
  EXPECT_EQ( text.substr( 0, 4 ), "n=5\n" );
  EXPECT_EQ( truth_table::from_text( text ), f );
  EXPECT_THROW( truth_table::from_text( "n=2\n01" ), precondition_error );
}

TEST( QkMembership, Examples )
{
  EXPECT_TRUE( is_in_qk( maj( 5 ), 2 ).member );
  EXPECT_TRUE( is_in_qk( thr( 7, 3 ), 3 ).member );
  const auto r = is_in_qk( thr( 7, 3 ), 4 );
  ASSERT_FALSE( r.member );
  ASSERT_EQ( r.witness.size(), 4u );
  for ( const auto& x : r.witness )
    EXPECT_FALSE( thr( 7, 3 )( x ) );
  EXPECT_FALSE( common_zero( r.witness ).has_value() );
}

TEST( QkMembership, ThresholdFamilyMatchesBruteForce )
{
  for ( uint32_t k = 2; k <= 6; ++k )
    for ( uint32_t n = 1; k * n + 1 <= 13; ++n )
    {
      const auto f = thr( k * n + 1, n + 1 );
      EXPECT_TRUE( is_in_qk( f, k ).member ) << k << " " << n;
      const auto over = is_in_qk( f, k + 1 );
      EXPECT_FALSE( over.member ) << k << " " << n;
      EXPECT_FALSE( common_zero( over.witness ).has_value() );
    }
  for ( uint32_t m = 3; m <= 13; m += 2 )
    EXPECT_TRUE( is_in_qk( maj( m ), 2 ).member );
}

TEST( QkMembership, AgreesWithOracleOnSmallFunctions )
{
  rng gen( 11 );
  for ( int trial = 0; trial < 200; ++trial )
  {
    truth_table f( 4 );
    for ( uint64_t x = 0; x < 16; ++x )
      f.set( x, gen.below( 4 ) != 0 );
    for ( uint32_t k = 2; k <= 3; ++k )
    {
      ASSERT_EQ( is_in_qk( f, k ).member, oracle::in_qk( f, k ) ) << f.to_text();
      ASSERT_EQ( is_in_rk( f, k ).member, oracle::in_rk( f, k ) ) << f.to_text();
    }
  }
}

TEST( QkMembership, BudgetIsEnforced )
{
  // A witness needs four levels of search, so three evaluations cannot suffice.
  EXPECT_THROW( is_in_qk( thr( 7, 3 ), 4, 3 ), budget_error );
  EXPECT_THROW( is_in_rk( maj( 9 ), 3, 3 ), budget_error );
  EXPECT_LE( is_in_qk( thr( 7, 3 ), 4 ).evaluations, default_tuple_budget );
}

TEST( RkMembership, Examples )
{
  EXPECT_TRUE( is_in_rk( maj( 5 ), 2 ).member );
  truth_table single( 3 );
  for ( uint64_t x = 1; x < 8; ++x )
    single.set( x, true );
  EXPECT_TRUE( is_in_rk( single, 4 ).member );
  truth_table parity( 2 );
  parity.set( 1, true );
  parity.set( 2, true );
  const auto r = is_in_rk( parity, 2 );
  EXPECT_FALSE( r.member );
  EXPECT_FALSE( common_agreement( r.witness ).has_value() );
}

TEST( RkMembership, ImpliedByQk )
{
  for ( uint32_t k = 2; k <= 4; ++k )
    for ( uint32_t n = 1; k * n + 1 <= 9; ++n )
    {
      const auto f = thr( k * n + 1, n + 1 );
      EXPECT_TRUE( !is_in_qk( f, k ).member || is_in_rk( f, k ).member );
    }
}

TEST( Duality, Examples )
{
  EXPECT_TRUE( is_self_dual( maj( 3 ) ) );
  EXPECT_TRUE( is_monotone( thr( 5, 2 ) ) );
  EXPECT_FALSE( is_self_dual( thr( 5, 2 ) ) );
  EXPECT_TRUE( thr( 5, 2 )( bv( "11000" ) ) && thr( 5, 2 )( bv( "11000" ).negated() ) );
}

TEST( Duality, ThresholdsAreMonotone )
{
  for ( uint32_t b = 1; b <= 16; ++b )
    for ( uint32_t a = 1; a <= b; ++a )
      ASSERT_TRUE( is_monotone( thr( b, a ) ) ) << b << " " << a;
  truth_table x1_bar( 2 );
  x1_bar.set( 0, true );
  x1_bar.set( 2, true );
  EXPECT_FALSE( is_monotone( x1_bar ) );
}

TEST( CommonZero, Examples )
{
  const std::vector<bit_vector> a{ bv( "100" ), bv( "010" ) };
  EXPECT_EQ( common_zero( a ), 3u );
  const std::vector<bit_vector> b{ bv( "111" ) };
  EXPECT_FALSE( common_zero( b ).has_value() );
  const std::vector<bit_vector> c{ bv( "1100000" ), bv( "0011000" ), bv( "0000110" ), bv( "0000001" ) };
  EXPECT_FALSE( common_zero( c ).has_value() );
  for ( auto x : c )
    EXPECT_FALSE( thr( 7, 3 )( x ) );
}

TEST( CommonZero, ResultIsZeroEverywhere )
{
  rng gen( 3 );
  for ( int trial = 0; trial < 500; ++trial )
  {
    std::vector<bit_vector> vs;
    for ( int i = 0; i < 3; ++i )
      vs.emplace_back( 6, gen.below( 64 ) );
    if ( auto c = common_zero( vs ) )
    {
      for ( const auto& v : vs )
        ASSERT_FALSE( v[*c] );
    }
    if ( auto ag = common_agreement( vs ) )
    {
      for ( const auto& v : vs )
        ASSERT_EQ( v[ag->first], ag->second );
    }
  }
}

TEST( FunctionSpec, Parse )
{
  EXPECT_EQ( parse_function( "thr:7:3" ), thr( 7, 3 ) );
  EXPECT_EQ( parse_function( "maj:5" ), thr( 5, 3 ) );
  EXPECT_THROW( parse_function( "xor:3" ), precondition_error );
  EXPECT_THROW( parse_function( "thr:3" ), precondition_error );
}
