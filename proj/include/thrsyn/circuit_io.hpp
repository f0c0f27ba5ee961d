#pragma once

#include <thrsyn/circuit.hpp>

#include <json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace thrsyn
{

using json = nlohmann::json;

inline gate_kind parse_gate_kind( const std::string& s )
{
  if ( s == "var" )
    return gate_kind::var;
  if ( s == "lit" )
    return gate_kind::lit;
  if ( s == "and" )
    return gate_kind::and_;
  if ( s == "or" )
    return gate_kind::or_;
  if ( s == "thr" )
    return gate_kind::thr;
  throw precondition_error( "unknown gate kind '" + s + "'" );
}

/// Canonical JSON: pruned, gate ids equal to positions in topological order.
inline json circuit_to_json( const circuit& c )
{
  const auto p = prune( c );
  json gates = json::array();
  for ( std::size_t id = 0; id < p.num_gates(); ++id )
  {
    const auto& g = p.gates()[id];
    json j;
    j["id"] = id;
    j["kind"] = to_string( g.kind );
    j["children"] = g.children;
    if ( g.is_leaf() )
      j["var"] = g.var;
    if ( g.kind == gate_kind::lit )
      j["neg"] = g.negated;
    if ( g.kind == gate_kind::thr )
      j["fanin"] = g.children.size();
    gates.push_back( std::move( j ) );
  }
  return json{ { "n", p.arity() }, { "output", p.output() }, { "gates", std::move( gates ) } };
}

/// Accepts gates in any order with arbitrary distinct ids; rejects cycles and
/// malformed gates, then prunes unreachable gates.
inline circuit circuit_from_json( const json& j )
{
  try
  {
    const auto n = j.at( "n" ).get<uint32_t>();
    const auto& gates = j.at( "gates" );
    if ( !gates.is_array() )
      throw precondition_error( "'gates' must be an array" );

    std::unordered_map<int64_t, std::size_t> position;
    for ( std::size_t i = 0; i < gates.size(); ++i )
    {
      const auto id = gates[i].at( "id" ).get<int64_t>();
      if ( !position.emplace( id, i ).second )
        throw precondition_error( "duplicate gate id " + std::to_string( id ) );
    }

    circuit c( n );
    std::vector<int> state( gates.size(), 0 ); // 0 new, 1 in progress, 2 done
    std::vector<uint32_t> emitted( gates.size(), 0 );
    auto visit = [&]( auto&& self, std::size_t i ) -> uint32_t {
      if ( state[i] == 2 )
        return emitted[i];
      if ( state[i] == 1 )
        throw precondition_error( "gate graph contains a cycle through id " + std::to_string( gates[i].at( "id" ).get<int64_t>() ) );
      state[i] = 1;
      const auto& gj = gates[i];
      gate g;
      g.kind = parse_gate_kind( gj.at( "kind" ).get<std::string>() );
      if ( gj.contains( "children" ) )
      {
        for ( const auto& ch : gj.at( "children" ) )
        {
          auto it = position.find( ch.get<int64_t>() );
          if ( it == position.end() )
            throw precondition_error( "gate references unknown child " + std::to_string( ch.get<int64_t>() ) );
          g.children.push_back( self( self, it->second ) );
        }
      }
      if ( g.is_leaf() )
        g.var = gj.at( "var" ).get<uint32_t>();
      if ( g.kind == gate_kind::lit )
        g.negated = gj.value( "neg", false );
      if ( g.kind == gate_kind::thr )
      {
        if ( gj.at( "fanin" ).get<std::size_t>() != g.children.size() )
          throw precondition_error( "thr gate fanin field does not match its child count" );
        if ( gj.value( "threshold", 2 ) != 2 )
          throw precondition_error( "only threshold-2 gates are supported" );
      }
      emitted[i] = c.add_gate( std::move( g ) );
      state[i] = 2;
      return emitted[i];
    };
    for ( std::size_t i = 0; i < gates.size(); ++i )
      visit( visit, i );

    auto out = position.find( j.at( "output" ).get<int64_t>() );
    if ( out == position.end() )
      throw precondition_error( "output refers to an unknown gate" );
    c.set_output( emitted[out->second] );
    return prune( c );
  }
  catch ( const json::exception& e )
  {
    throw precondition_error( std::string( "malformed circuit JSON: " ) + e.what() );
  }
}

inline std::string gate_label( const gate& g )
{
  switch ( g.kind )
  {
  case gate_kind::var:
    return "x" + std::to_string( g.var );
  case gate_kind::lit:
    return ( g.negated ? "~x" : "x" ) + std::to_string( g.var );
  case gate_kind::and_:
    return "AND";
  case gate_kind::or_:
    return "OR";
  case gate_kind::thr:
    return g.children.size() == 3 ? "MAJ3" : "THR(" + std::to_string( g.children.size() ) + ",2)";
  }
  return "?";
}

/// Graphviz export: one node per reachable gate, edges child -> parent.
inline void write_dot( const circuit& c, std::ostream& os )
{
  const auto p = prune( c );
  os << "digraph circuit {\n  rankdir=BT;\n";
  for ( std::size_t id = 0; id < p.num_gates(); ++id )
  {
    const auto& g = p.gates()[id];
    os << "  g" << id << " [label=\"" << gate_label( g ) << "\"" << ( g.is_leaf() ? ", shape=box" : "" )
       << ( id == p.output() ? ", peripheries=2" : "" ) << "];\n";
  }
  for ( std::size_t id = 0; id < p.num_gates(); ++id )
    for ( auto ch : p.gates()[id].children )
      os << "  g" << ch << " -> g" << id << ";\n";
  os << "}\n";
}

inline json read_json_file( const std::string& path )
{
  std::ifstream in( path );
  if ( !in )
    throw precondition_error( "cannot open '" + path + "'" );
  try
  {
    return json::parse( in );
  }
  catch ( const json::exception& e )
  {
    throw precondition_error( "'" + path + "' is not valid JSON: " + e.what() );
  }
}

inline void write_json_file( const std::string& path, const json& j )
{
  std::ofstream out( path );
  if ( !out )
    throw precondition_error( "cannot write '" + path + "'" );
  out << j.dump() << '\n';
}

} // namespace thrsyn
