#pragma once

#include <thrsyn/circuit_io.hpp>
#include <thrsyn/protocol.hpp>

#include <ostream>
#include <string>
#include <unordered_map>

namespace thrsyn
{

inline json light_form_to_json( const light_form& lf )
{
  json nodes = json::array();
  for ( std::size_t v = 0; v < lf.nodes.size(); ++v )
  {
    const auto& node = lf.nodes[v];
    json j{ { "id", v }, { "terminal", node.terminal } };
    if ( node.terminal )
    {
      j["label"] = node.label;
      if ( lf.kind == game_kind::r )
        j["bit"] = node.label_bit ? 1 : 0;
    }
    else
      j["owner"] = node.owner;
    nodes.push_back( std::move( j ) );
  }
  json edges = json::array();
  for ( const auto& e : lf.edges )
    edges.push_back( json{ { "from", e.from }, { "to", e.to }, { "label", e.label } } );
  return json{ { "k", lf.k },         { "n", lf.n },         { "kind", to_string( lf.kind ) },
               { "nodes", nodes },    { "edges", edges },    { "start", lf.start } };
}

inline json protocol_to_json( const protocol_dag& p )
{
  auto j = light_form_to_json( p.graph );
  json arena = json::array();
  for ( const auto& x : p.arena )
    arena.push_back( x.str() );
  j["arena"] = std::move( arena );
  json messages = json::object();
  for ( uint32_t i = 0; i < p.graph.k; ++i )
  {
    json tables = json::object();
    for ( std::size_t v = 0; v < p.graph.nodes.size(); ++v )
      if ( i < p.messages.size() && v < p.messages[i].size() && !p.messages[i][v].empty() )
        tables[std::to_string( v )] = p.messages[i][v];
    messages[std::to_string( i + 1 )] = std::move( tables );
  }
  j["messages"] = std::move( messages );
  return j;
}

namespace detail
{

inline light_form light_form_from_json( const json& j, std::unordered_map<int64_t, uint32_t>& position )
{
  light_form lf;
  lf.k = j.at( "k" ).get<uint32_t>();
  lf.n = j.at( "n" ).get<uint32_t>();
  lf.kind = parse_game_kind( j.at( "kind" ).get<std::string>() );
  for ( const auto& nj : j.at( "nodes" ) )
  {
    const auto id = nj.at( "id" ).get<int64_t>();
    if ( !position.emplace( id, static_cast<uint32_t>( lf.nodes.size() ) ).second )
      throw precondition_error( "duplicate node id " + std::to_string( id ) );
    protocol_node node;
    node.terminal = nj.value( "terminal", false );
    if ( node.terminal )
    {
      node.label = nj.at( "label" ).get<uint32_t>();
      node.label_bit = nj.value( "bit", 0 ) != 0;
    }
    else
      node.owner = nj.value( "owner", 0u );
    lf.nodes.push_back( node );
  }
  auto lookup = [&]( const json& id ) {
    auto it = position.find( id.get<int64_t>() );
    if ( it == position.end() )
      throw precondition_error( "reference to unknown node " + std::to_string( id.get<int64_t>() ) );
    return it->second;
  };
  for ( const auto& ej : j.at( "edges" ) )
    lf.add_edge( lookup( ej.at( "from" ) ), lookup( ej.at( "to" ) ), ej.at( "label" ).get<uint8_t>() );
  lf.start = lookup( j.at( "start" ) );
  return lf;
}

} // namespace detail

/// Parses a light form; structural problems are reported by `validate`, not here.
inline light_form light_form_from_json( const json& j )
{
  try
  {
    std::unordered_map<int64_t, uint32_t> position;
    return detail::light_form_from_json( j, position );
  }
  catch ( const json::exception& e )
  {
    throw precondition_error( std::string( "malformed light form JSON: " ) + e.what() );
  }
}

inline protocol_dag protocol_from_json( const json& j )
{
  try
  {
    std::unordered_map<int64_t, uint32_t> position;
    protocol_dag p;
    p.graph = detail::light_form_from_json( j, position );
    if ( !j.contains( "arena" ) || !j.contains( "messages" ) )
      throw precondition_error( "protocol JSON needs 'arena' and 'messages' (light forms cannot be simulated)" );
    for ( const auto& s : j.at( "arena" ) )
      p.arena.push_back( bit_vector::parse( s.get<std::string>() ) );
    p.messages.assign( p.graph.k, std::vector<std::vector<uint8_t>>( p.graph.nodes.size() ) );
    for ( const auto& [party, tables] : j.at( "messages" ).items() )
    {
      const auto i = std::stoul( party );
      if ( i < 1 || i > p.graph.k )
        throw precondition_error( "message tables for unknown party " + party );
      for ( const auto& [node, bits] : tables.items() )
      {
        auto it = position.find( std::stoll( node ) );
        if ( it == position.end() )
          throw precondition_error( "message table for unknown node " + node );
        p.messages[i - 1][it->second] = bits.get<std::vector<uint8_t>>();
      }
    }
    return p;
  }
  catch ( const json::exception& e )
  {
    throw precondition_error( std::string( "malformed protocol JSON: " ) + e.what() );
  }
  catch ( const std::invalid_argument& )
  {
    throw precondition_error( "malformed protocol JSON: party and node keys must be integers" );
  }
}

inline bool is_protocol_json( const json& j ) { return j.contains( "edges" ) && j.contains( "start" ); }

/// Graphviz export; edges point from parent to child and carry their label.
inline void write_dot( const light_form& lf, std::ostream& os )
{
  os << "digraph protocol {\n";
  for ( std::size_t v = 0; v < lf.nodes.size(); ++v )
  {
    const auto& node = lf.nodes[v];
    os << "  v" << v << " [label=\"";
    if ( node.terminal )
    {
      os << node.label;
      if ( lf.kind == game_kind::r )
        os << '/' << ( node.label_bit ? 1 : 0 );
      os << "\", shape=box";
    }
    else
      os << "P" << node.owner << "\"";
    if ( v == lf.start )
      os << ", peripheries=2";
    os << "];\n";
  }
  for ( const auto& e : lf.edges )
    os << "  v" << e.from << " -> v" << e.to << " [label=\"" << int( e.label ) << "\"];\n";
  os << "}\n";
}

} // namespace thrsyn
