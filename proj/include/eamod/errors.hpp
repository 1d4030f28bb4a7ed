#pragma once

#include <stdexcept>
#include <string>

namespace eamod {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class UnreachableNode : public Error {
public:
    UnreachableNode(int from, int to)
        : Error("no path from node " + std::to_string(from) + " to node " + std::to_string(to)),
          from_node(from), to_node(to) {}
    int from_node;
    int to_node;
};

class UnknownNode : public Error {
public:
    explicit UnknownNode(int id) : Error("unknown node id " + std::to_string(id)), node(id) {}
    int node;
};

class InvalidDimension : public Error {
public:
    explicit InvalidDimension(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t row, const std::string& what)
        : Error(file + ":" + std::to_string(row) + ": " + what), row(row) {}
    std::size_t row;
};

class SelfLoopRequest : public Error {
public:
    explicit SelfLoopRequest(int request_id)
        : Error("request " + std::to_string(request_id) + " has origin == destination"),
          request(request_id) {}
    int request;
};

class SampleTooLarge : public Error {
public:
    SampleTooLarge(std::size_t asked, std::size_t have)
        : Error("sample size " + std::to_string(asked) + " exceeds population " + std::to_string(have)) {}
};

class MismatchedShapes : public Error {
public:
    explicit MismatchedShapes(const std::string& what) : Error(what) {}
};

class InstanceTooLarge : public Error {
public:
    explicit InstanceTooLarge(const std::string& what) : Error(what) {}
};

class InfeasibleModel : public Error {
public:
    explicit InfeasibleModel(const std::string& what) : Error(what) {}
};

class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& key, const std::string& what)
        : Error("config key '" + key + "': " + what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

class ZeroBattery : public Error {
public:
    ZeroBattery() : Error("battery capacity must be positive") {}
};

class EmptyResults : public Error {
public:
    EmptyResults() : Error("no results to aggregate") {}
    explicit EmptyResults(const std::string& what) : Error(what) {}
};

} // namespace eamod
