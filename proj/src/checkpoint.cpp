#include "vacflow/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "vacflow/errors.hpp"

namespace vacflow {

using nlohmann::json;

namespace {

std::uint64_t to_le(std::uint64_t b) {
  if constexpr (std::endian::native == std::endian::little) return b;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((b >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

void append_le(std::string& out, std::span<const double> v) {
  const std::size_t at = out.size();
  out.resize(at + 8 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(v[i]));
    std::memcpy(out.data() + at + 8 * i, &bits, 8);
  }
}

void read_le(const std::string& in, std::size_t offset, std::span<double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, in.data() + offset + 8 * i, 8);
    v[i] = std::bit_cast<double>(to_le(bits));
  }
}

std::string at_offset(std::size_t off) { return "byte offset " + std::to_string(off); }

}  // namespace

double Checkpoint::scalar(const std::string& name) const {
  for (const auto& [k, v] : scalars)
    if (k == name) return v;
  throw FormatError("checkpoint has no scalar '" + name + "'");
}

void write_checkpoint(const std::string& path, const Checkpoint& c) {
  const TorusGrid& g = c.state.grid();
  const SimState& s = c.state;
  const std::vector<std::pair<std::string, std::span<const double>>> grid_fields{
      {"rho", s.rho.values()}, {"u0", s.u[0].values()}, {"u1", s.u[1].values()},
      {"u2", s.u[2].values()}, {"p", s.p.values()}};
  std::vector<double> scalars{s.t, static_cast<double>(s.step), s.dissipation_integral, s.grad4_integral};
  json names = {"t", "step", "dissipation_integral", "grad4_integral"};
  for (const auto& [k, v] : c.scalars) {
    names.push_back(k);
    scalars.push_back(v);
  }

  std::string payload;
  json fields = json::array();
  for (const auto& [name, v] : grid_fields) {
    fields.push_back({{"name", name}, {"offset", payload.size()}, {"count", v.size()}});
    append_le(payload, v);
  }
  fields.push_back({{"name", "scalars"}, {"offset", payload.size()}, {"count", scalars.size()}});
  append_le(payload, scalars);

  json header = {{"schema_version", kCheckpointSchema},
                 {"n", g.n()},
                 {"L", g.length()},
                 {"t", s.t},
                 {"step", s.step},
                 {"mu", c.mu},
                 {"fields", fields},
                 {"scalar_names", names},
                 {"payload_bytes", payload.size()},
                 {"meta", c.meta}};

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write checkpoint '" + path + "'");
    out << kCheckpointMagic << ' ' << kCheckpointSchema << '\n' << header.dump() << '\n';
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw FormatError("short write on checkpoint '" + path + "'");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const std::string magic = std::string(kCheckpointMagic) + ' ' + std::to_string(kCheckpointSchema) + '\n';
  if (bytes.compare(0, magic.size(), magic) != 0) {
    std::size_t i = 0;
    while (i < magic.size() && i < bytes.size() && bytes[i] == magic[i]) ++i;
    throw FormatError(path + ": bad magic line at " + at_offset(i));
  }
  const std::size_t header_end = bytes.find('\n', magic.size());
  if (header_end == std::string::npos) throw FormatError(path + ": header not terminated, " + at_offset(bytes.size()));
  json h;
  try {
    h = json::parse(bytes.begin() + magic.size(), bytes.begin() + header_end);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": header is not JSON at " + at_offset(magic.size() + e.byte - 1));
  }
  const std::size_t base = header_end + 1;

  try {
    if (h.at("schema_version").get<int>() != kCheckpointSchema)
      throw FormatError(path + ": unsupported schema version");
    const TorusGrid g(h.at("n").get<int>(), h.at("L").get<double>());
    const std::size_t declared = h.at("payload_bytes").get<std::size_t>();
    const std::size_t actual = bytes.size() - base;
    if (actual != declared) {
      throw FormatError(path + ": payload is " + std::to_string(actual) + " bytes, header declares " +
                        std::to_string(declared) + "; first inconsistent " +
                        at_offset(base + std::min(actual, declared)));
    }

    Checkpoint c(g);
    c.mu = h.at("mu").get<double>();
    c.meta = h.value("meta", json::object());
    const json& fields = h.at("fields");
    const char* expected_names[] = {"rho", "u0", "u1", "u2", "p", "scalars"};
    if (fields.size() != 6) throw FormatError(path + ": expected 6 field entries");
    ScalarField* targets[] = {&c.state.rho, &c.state.u[0], &c.state.u[1], &c.state.u[2], &c.state.p};
    std::vector<double> scalars;
    std::size_t expect = 0;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const std::string name = fields[f].at("name").get<std::string>();
      const std::size_t offset = fields[f].at("offset").get<std::size_t>();
      const std::size_t count = fields[f].at("count").get<std::size_t>();
      if (name != expected_names[f]) throw FormatError(path + ": field " + std::to_string(f) + " is '" + name + "'");
      if (offset != expect) {
        throw FormatError(path + ": field '" + name + "' declared at payload offset " + std::to_string(offset) +
                          ", expected " + std::to_string(expect) + "; first inconsistent " +
                          at_offset(base + std::min(offset, expect)));
      }
      if (f < 5 && count != g.cells()) {
        throw FormatError(path + ": field '" + name + "' has " + std::to_string(count) + " values, grid needs " +
                          std::to_string(g.cells()) + "; first inconsistent " + at_offset(base + offset));
      }
      if (offset + 8 * count > declared) {
        throw FormatError(path + ": field '" + name + "' runs past the payload; first inconsistent " +
                          at_offset(base + declared));
      }
      if (f < 5) {
        read_le(bytes, base + offset, targets[f]->values());
      } else {
        scalars.resize(count);
        read_le(bytes, base + offset, scalars);
      }
      expect = offset + 8 * count;
    }
    if (expect != declared) {
      throw FormatError(path + ": " + std::to_string(declared - expect) + " trailing payload bytes; first inconsistent " +
                        at_offset(base + expect));
    }

    const json& names = h.at("scalar_names");
    if (names.size() != scalars.size() || scalars.size() < 4)
      throw FormatError(path + ": scalar names do not match the scalar block at " + at_offset(base + fields[5].at("offset").get<std::size_t>()));
    c.state.t = scalars[0];
    c.state.step = static_cast<long>(scalars[1]);
    c.state.dissipation_integral = scalars[2];
    c.state.grad4_integral = scalars[3];
    for (std::size_t i = 4; i < scalars.size(); ++i) c.scalars.emplace_back(names[i].get<std::string>(), scalars[i]);
    if (c.state.t != h.at("t").get<double>() || c.state.step != h.at("step").get<long>())
      throw FormatError(path + ": header time disagrees with the payload at " + at_offset(base + fields[5].at("offset").get<std::size_t>()));
    return c;
  } catch (const FormatError&) {
    throw;
  } catch (const json::exception& e) {
    throw FormatError(path + ": malformed header: " + e.what());
  } catch (const Error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace vacflow
