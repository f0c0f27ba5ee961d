#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

using namespace thrsyn;

TEST( CircuitJson, RoundTripIsBitExact )
{
  for ( const auto& c : { batcher_majority( 7 ), dnc_threshold_formula( 6, 3 ), theorem1_circuit( 1, dnc_threshold_formula( 3, 2 ) ) } )
  {
    const auto j = circuit_to_json( c );
    const auto back = circuit_from_json( j );
    EXPECT_EQ( back, prune( c ) );
    EXPECT_EQ( circuit_to_json( back ).dump(), j.dump() );
  }
}

TEST( CircuitJson, LiteralsAndThresholds )
{
  circuit c( 4 );
  c.set_output( c.add_thr( { c.add_lit( 1, true ), c.add_var( 2 ), c.add_var( 3 ), c.add_lit( 4, false ) } ) );
  const auto back = circuit_from_json( circuit_to_json( c ) );
  EXPECT_EQ( to_truth_table( back ), to_truth_table( c ) );
  EXPECT_EQ( back, prune( c ) );
}

TEST( CircuitJson, RejectsMalformedInput )
{
  EXPECT_THROW( circuit_from_json( json::parse( R"({"n":2})" ) ), precondition_error );
  EXPECT_THROW( circuit_from_json( json::parse( R"({"n":2,"output":5,"gates":[{"id":0,"kind":"var","var":1}]})" ) ),
                precondition_error );
  EXPECT_THROW( circuit_from_json( json::parse( R"({"n":2,"output":0,"gates":[{"id":0,"kind":"xor","children":[]}]})" ) ),
                precondition_error );
  EXPECT_THROW( circuit_from_json( json::parse( R"({"n":2,"output":0,"gates":[{"id":0,"kind":"and","children":[0,0]}]})" ) ),
                precondition_error );
  EXPECT_THROW( circuit_from_json( json::parse( R"({"n":1,"output":0,"gates":[{"id":0,"kind":"var","var":3}]})" ) ),
                precondition_error );
}

TEST( ProtocolJson, RejectsMalformedInput )
{
  auto j = protocol_to_json( binary_search_protocol( 2, 1 ) );
  j["start"] = 999;
  EXPECT_THROW( protocol_from_json( j ), precondition_error );
  EXPECT_THROW( light_form_from_json( json::parse( R"({"k":2,"n":1})" ) ), precondition_error );
  EXPECT_TRUE( is_protocol_json( protocol_to_json( binary_search_protocol( 2, 1 ) ) ) );
  EXPECT_FALSE( is_protocol_json( circuit_to_json( batcher_majority( 3 ) ) ) );
}

TEST( ProtocolJson, ArbitraryNodeIds )
{
  const auto p = theorem3_protocol( 2, 1 );
  auto j = light_form_to_json( p.graph );
  for ( auto& node : j["nodes"] )
    node["id"] = 50 + node["id"].get<int64_t>() * 3;
  for ( auto& e : j["edges"] )
  {
    e["from"] = 50 + e["from"].get<int64_t>() * 3;
    e["to"] = 50 + e["to"].get<int64_t>() * 3;
  }
  j["start"] = 50 + j["start"].get<int64_t>() * 3;
  const auto lf = light_form_from_json( j );
  EXPECT_EQ( depth( lf ), depth( p.graph ) );
  EXPECT_EQ( size( lf ), size( p.graph ) );
  EXPECT_FALSE( validate( lf ).has_value() );
}

TEST( Dot, CircuitAndProtocol )
{
  std::ostringstream c;
  write_dot( batcher_majority( 3 ), c );
  EXPECT_EQ( c.str().rfind( "digraph", 0 ), 0u );
  EXPECT_NE( c.str().find( "->" ), std::string::npos );
  EXPECT_EQ( c.str().back(), '\n' );

  std::ostringstream p;
  write_dot( binary_search_light_form( 2, 1 ), p );
  EXPECT_EQ( p.str().rfind( "digraph", 0 ), 0u );
  EXPECT_NE( p.str().find( "P1" ), std::string::npos );
  EXPECT_NE( p.str().find( "peripheries=2" ), std::string::npos );
}

TEST( Files, WriteAndRead )
{
  const auto path = std::filesystem::temp_directory_path() / "thrsyn_io_test.json";
  const auto j = circuit_to_json( batcher_majority( 5 ) );
  write_json_file( path.string(), j );
  EXPECT_EQ( read_json_file( path.string() ), j );
  std::filesystem::remove( path );
  EXPECT_THROW( read_json_file( ( std::filesystem::temp_directory_path() / "thrsyn_missing.json" ).string() ), precondition_error );
}
