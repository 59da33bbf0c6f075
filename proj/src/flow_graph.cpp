#include "uspread/flow_graph.hpp"

#include <fstream>
#include <sstream>

namespace uspread {

FlowGraph::FlowGraph(int vertex_count) : n_(vertex_count) {
    if (vertex_count < 0) throw InputError("FlowGraph: negative vertex count");
}

int FlowGraph::add_edge(int u, int v, Rational p) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_)
        throw InputError("FlowGraph: edge endpoint out of range (" + std::to_string(u) + "," +
                         std::to_string(v) + ")");
    edges_.push_back(EdgePair{u, v, std::move(p)});
    return edge_count() - 1;
}

std::vector<Rational> FlowGraph::divergences() const {
    std::vector<Rational> r(static_cast<std::size_t>(n_), Rational(0));
    for (const EdgePair& e : edges_) {
        r[static_cast<std::size_t>(e.u)] += e.p;
        r[static_cast<std::size_t>(e.v)] -= e.p;
    }
    return r;
}

bool FlowGraph::all_integer() const {
    for (const EdgePair& e : edges_)
        if (!e.p.is_integer()) return false;
    return true;
}

FlowGraph read_flow_graph(std::istream& in) {
    std::string line;
    int n = -1;
    long long m = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag, vtok, etok;
        ss >> tag >> vtok >> etok;
        if (tag != "flowgraph" || vtok.rfind("v=", 0) != 0 || etok.rfind("e=", 0) != 0)
            throw InputError("flowgraph: bad header line '" + line + "'");
        try {
            n = std::stoi(vtok.substr(2));
            m = std::stoll(etok.substr(2));
        } catch (const std::exception&) {
            throw InputError("flowgraph: bad header numbers in '" + line + "'");
        }
        break;
    }
    if (n < 0 || m < 0) throw InputError("flowgraph: missing or invalid header");

    FlowGraph g(n);
    long long read = 0;
    long long lineno = 1;
    while (read < m && std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        int u, v;
        std::string ptext;
        if (!(ss >> u >> v >> ptext))
            throw InputError("flowgraph: bad edge on line " + std::to_string(lineno) + ": '" +
                             line + "'");
        std::string extra;
        if (ss >> extra)
            throw InputError("flowgraph: trailing tokens on line " + std::to_string(lineno));
        g.add_edge(u, v, Rational::parse(ptext));
        ++read;
    }
    if (read != m)
        throw InputError("flowgraph: header promised " + std::to_string(m) + " edges, found " +
                         std::to_string(read));
    return g;
}

FlowGraph read_flow_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open flow-graph file '" + path + "'");
    return read_flow_graph(in);
}

void write_flow_graph(std::ostream& out, const FlowGraph& g) {
    out << "flowgraph v=" << g.vertex_count() << " e=" << g.edge_count() << "\n";
    for (const EdgePair& e : g.edges())
        out << e.u << ' ' << e.v << ' ' << e.p.to_string() << "\n";
}

void write_flow_graph_file(const std::string& path, const FlowGraph& g) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open output file '" + path + "'");
    write_flow_graph(out, g);
}

} // namespace uspread
