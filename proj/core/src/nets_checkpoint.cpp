#include "gpricing/nets/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gpricing/errors.hpp"

namespace gpricing::nets {

namespace {

constexpr std::string_view kMagic = "gpricing-checkpoint";

std::string hex(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  return {buf, res.ptr};
}

double parse_hex(const std::string& tok) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = first + tok.size();
  bool neg = false;
  if (first != last && *first == '-') {
    neg = true;
    ++first;
  }
  const auto res = std::from_chars(first, last, v, std::chars_format::hex);
  if (res.ec != std::errc() || res.ptr != last) {
    throw DataError("checkpoint: bad value '" + tok + "'");
  }
  return neg ? -v : v;
}

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += (i ? "," : "") + std::to_string(xs[i]);
  }
  return out;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(std::stoi(item));
  }
  return out;
}

template <class T>
T expect(std::istream& is, const char* what) {
  T v{};
  if (!(is >> v)) {
    throw DataError(std::string("checkpoint: truncated while reading ") + what);
  }
  return v;
}

void expect_word(std::istream& is, std::string_view word) {
  const auto got = expect<std::string>(is, "keyword");
  if (got != word) {
    throw DataError("checkpoint: expected '" + std::string(word) + "', found '" + got + "'");
  }
}

}  // namespace

const AafNet& Checkpoint::net(const std::string& label) const {
  for (const auto& [name, n] : nets) {
    if (name == label) {
      return n;
    }
  }
  throw ConfigError("checkpoint: no network labelled '" + label + "'");
}

AafNet& Checkpoint::net(const std::string& label) {
  return const_cast<AafNet&>(std::as_const(*this).net(label));
}

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  os << kMagic << ' ' << kCheckpointVersion << '\n';
  for (const auto& [k, v] : ckpt.meta) {
    if (k.find_first_of(" \t\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw ValidationError("checkpoint: metadata key '" + k + "' is not serialisable");
    }
    os << "meta " << k << ' ' << v << '\n';
  }
  for (const auto& [label, net] : ckpt.nets) {
    const NetShape& s = net.shape();
    os << "net " << label << ' ' << (s.kind == NetKind::value ? "value" : "generator") << ' '
       << s.channels << ' ' << s.embed << ' ' << join(s.hidden) << ' ' << s.heads << '\n';
    const Scaling& sc = net.scaling();
    os << "scaling " << hex(sc.out_shift) << ' ' << hex(sc.out_scale);
    for (std::size_t c = 0; c < sc.shift.size(); ++c) {
      os << ' ' << hex(sc.shift[c]) << ' ' << hex(sc.scale[c]);
    }
    os << '\n';
    const ParamStore& ps = net.params();
    for (int i = 0; i < static_cast<int>(ps.slices().size()); ++i) {
      const Slice& sl = ps.slice(i);
      os << "slice " << sl.name << ' ' << sl.rows << ' ' << sl.cols << '\n';
      const auto vals = ps.view(i);
      for (std::size_t j = 0; j < vals.size(); ++j) {
        os << hex(vals[j]) << ((j + 1) % 8 == 0 || j + 1 == vals.size() ? '\n' : ' ');
      }
    }
    os << "end\n";
  }
  if (!os) {
    throw DataError("checkpoint: write failed");
  }
}

Checkpoint read_checkpoint(std::istream& is) {
  Checkpoint ckpt;
  expect_word(is, kMagic);
  const int version = expect<int>(is, "version");
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  }
  std::string word;
  while (is >> word) {
    if (word == "meta") {
      const auto key = expect<std::string>(is, "meta key");
      std::string value;
      std::getline(is, value);
      if (!value.empty() && value.front() == ' ') {
        value.erase(0, 1);
      }
      ckpt.meta[key] = value;
    } else if (word == "net") {
      const auto label = expect<std::string>(is, "net label");
      const auto kind = expect<std::string>(is, "net kind");
      NetShape shape;
      if (kind == "value") {
        shape.kind = NetKind::value;
      } else if (kind == "generator") {
        shape.kind = NetKind::generator;
      } else {
        throw DataError("checkpoint: unknown net kind '" + kind + "'");
      }
      shape.channels = expect<int>(is, "channels");
      shape.embed = expect<int>(is, "embed");
      shape.hidden = split_ints(expect<std::string>(is, "hidden widths"));
      shape.heads = expect<int>(is, "heads");
      AafNet net(shape);
      expect_word(is, "scaling");
      Scaling sc = Scaling::identity(shape.channels);
      sc.out_shift = parse_hex(expect<std::string>(is, "scaling"));
      sc.out_scale = parse_hex(expect<std::string>(is, "scaling"));
      for (std::size_t c = 0; c < sc.shift.size(); ++c) {
        sc.shift[c] = parse_hex(expect<std::string>(is, "scaling"));
        sc.scale[c] = parse_hex(expect<std::string>(is, "scaling"));
      }
      try {
        net.set_scaling(std::move(sc));
      } catch (const ConfigError& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
      }
      ParamStore& ps = net.params();
      for (std::size_t i = 0; i < ps.slices().size(); ++i) {
        expect_word(is, "slice");
        const auto name = expect<std::string>(is, "slice name");
        const auto rows = expect<std::size_t>(is, "rows");
        const auto cols = expect<std::size_t>(is, "cols");
        const int id = ps.index(name);
        const Slice& sl = ps.slice(id);
        if (sl.rows != rows || sl.cols != cols) {
          throw DataError("checkpoint: slice '" + name + "' has the wrong shape");
        }
        for (double& v : ps.view(id)) {
          v = parse_hex(expect<std::string>(is, "value"));
        }
      }
      expect_word(is, "end");
      ckpt.nets.emplace_back(label, std::move(net));
    } else {
      throw DataError("checkpoint: unexpected token '" + word + "'");
    }
  }
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp);
    if (!os) {
      throw DataError("checkpoint: cannot open " + tmp.string());
    }
    write_checkpoint(os, ckpt);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw DataError("checkpoint: cannot open " + path.string());
  }
  return read_checkpoint(is);
}

}  // namespace gpricing::nets
