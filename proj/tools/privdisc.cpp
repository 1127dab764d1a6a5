// Copyright 2026 The privdisc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// privdisc: identity-provider issuance, advertising, discovery, a loopback
// 0-RTT connection demo, and benchmarks.

#include <sys/stat.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>

#include "privdisc/bench.hpp"
#include "privdisc/discovery.hpp"
#include "privdisc/wire.hpp"

namespace fs = std::filesystem;
using namespace privdisc;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kMalformedInput = 2,
  kNotAuthorized = 3,
  kExpired = 4,
  kCryptoFailure = 5,
};

struct Failure {
  int code;
  std::string message;
};

fs::path home() {
  const char* env = std::getenv("PRIVDISC_HOME");
  fs::path dir = env && *env ? fs::path(env) : fs::path(".privdisc");
  std::error_code ec;
  if (!fs::exists(dir)) {
    fs::create_directories(dir, ec);
    if (ec) throw Failure{kUsage, "cannot create " + dir.string() + ": " + ec.message()};
    fs::permissions(dir, fs::perms::owner_all, ec);
  }
  return dir;
}

Bytes read_all(std::istream& in) { return Bytes(std::istreambuf_iterator<char>(in), {}); }

Bytes read_input(const std::string& path) {
  if (path == "-") return read_all(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kUsage, "cannot read " + path};
  return read_all(in);
}

void write_new(const fs::path& path, ByteView bytes) {
  if (fs::exists(path)) throw Failure{kUsage, path.string() + " already exists"};
  const mode_t old = ::umask(077);
  std::ofstream out(path, std::ios::binary);
  ::umask(old);
  if (!out) throw Failure{kUsage, "cannot write " + path.string()};
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_output(const std::string& path, ByteView bytes) {
  if (path == "-") {
    std::cout.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{kUsage, "cannot write " + path};
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

template <class T>
T load(const fs::path& path) {
  return wire::decode<T>(read_input(path.string()));
}

// An identity named `id` is the file set <home>/<id>.{key,blessing,keyring}.
std::shared_ptr<const Principal> load_identity(const std::string& id) {
  const fs::path base = home() / id;
  Principal p;
  p.keypair = load<SigningKeyPair>(base.string() + ".key");
  p.blessings.push_back(load<Blessing>(base.string() + ".blessing"));
  const fs::path ring = base.string() + ".keyring";
  if (fs::exists(ring))
    p.keyrings.push_back(load<prefix::PrefixKeyRing>(ring));
  else
    p.keyrings.push_back(std::nullopt);
  if (p.blessing().public_key() != p.keypair.pub)
    throw Failure{kMalformedInput, id + ": blessing is not bound to its signing key"};
  return std::make_shared<const Principal>(std::move(p));
}

Principal load_idp() {
  const fs::path h = home();
  Principal p;
  p.keypair = load<SigningKeyPair>(h / "idp.key");
  p.blessings.push_back(load<Blessing>(h / "idp.blessing"));
  p.ibe_root = ibe::MasterKeyPair{load<ibe::MasterPublicKey>(h / "mpk"), load<ibe::MasterSecretKey>(h / "msk")};
  p.keyrings.push_back(std::nullopt);
  return p;
}

TrustAnchors load_anchors() { return load<TrustAnchors>(home() / "anchors"); }

std::uint64_t wall_clock() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
}

std::string fingerprint(const Key32& k) {
  const Key32 d = tagged_hash(HashDomain::kKeyFingerprint, {k});
  return to_hex(ByteView(d).first(16));
}

int discover_exit(discovery::DiscoverStatus s) {
  using discovery::DiscoverStatus;
  switch (s) {
    case DiscoverStatus::kOk: return kOk;
    case DiscoverStatus::kNotAuthorized:
    case DiscoverStatus::kPolicy: return kNotAuthorized;
    case DiscoverStatus::kExpired: return kExpired;
    case DiscoverStatus::kMalformed: return kMalformedInput;
    default: return kCryptoFailure;
  }
}

int error_exit(const Error& e) {
  switch (e.code()) {
    case Errc::kMalformed:
    case Errc::kTruncated:
    case Errc::kUnknownVersion:
    case Errc::kOversize:
    case Errc::kInvalidName: return kMalformedInput;
    case Errc::kIo: return kUsage;
    default: return kCryptoFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private service discovery and mutual authentication"};
  app.require_subcommand(1);
  std::uint64_t now = 0;
  app.add_option("--now", now, "Unix time to use instead of the wall clock");

  std::string keygen_out;
  auto* keygen = app.add_subcommand("keygen", "Generate a signing key pair as <id>.key and <id>.pub");
  keygen->add_option("--out", keygen_out, "Identity file name")->required();

  auto* idp = app.add_subcommand("idp", "Identity provider");
  idp->require_subcommand(1);
  std::string root_name = "dev.v.io";
  auto* idp_init = idp->add_subcommand("init", "Create IBE master keys, root blessing and trust anchor");
  idp_init->add_option("--name", root_name, "Root name component");
  std::string issue_name, issue_pub, issue_out;
  auto* idp_issue = idp->add_subcommand("issue", "Issue a blessing and prefix key ring");
  idp_issue->add_option("--name", issue_name, "Hierarchical name")->required();
  idp_issue->add_option("--pubkey", issue_pub, "Subject public key file (33 bytes)")->required();
  idp_issue->add_option("--out", issue_out, "Identity file name")->required();

  std::string identity, policy_list, out_path = "-", in_path = "-", accept_list;
  std::uint64_t ttl = discovery::kDefaultTtl;
  bool txt = false;
  auto* advertise = app.add_subcommand("advertise", "Emit a signed, prefix-encrypted broadcast");
  advertise->add_option("--identity", identity, "Server identity")->required();
  advertise->add_option("--policy", policy_list, "Comma-separated audience prefixes")->required();
  advertise->add_option("--ttl", ttl, "Lifetime in seconds");
  advertise->add_option("--out", out_path, "Output file or -");
  advertise->add_flag("--txt", txt, "Also print the mDNS TXT form to stderr");

  auto* discover = app.add_subcommand("discover", "Process a broadcast");
  discover->add_option("--identity", identity, "Client identity")->required();
  discover->add_option("--in", in_path, "Broadcast file or -");
  discover->add_option("--accept", accept_list, "Prefixes the server must match (default: any)");

  std::string server_id, client_id, early_path;
  auto* connect = app.add_subcommand("connect", "Run a 0-RTT exchange over an in-process loopback");
  connect->add_option("--server", server_id, "Server identity")->required();
  connect->add_option("--client", client_id, "Client identity")->required();
  connect->add_option("--policy", policy_list, "Server audience prefixes")->required();
  connect->add_option("--accept", accept_list, "Prefixes the server must match (default: any)");
  connect->add_option("--early-data", early_path, "File sent as early application data");

  std::string bench_kind;
  std::size_t iterations = bench::kMinIterations;
  auto* benchcmd = app.add_subcommand("bench", "IBE or handshake benchmarks as TSV");
  benchcmd->add_option("kind", bench_kind, "ibe | handshake")->required()->check(CLI::IsMember({"ibe", "handshake"}));
  benchcmd->add_option("--iterations", iterations, "Samples per row (at least 50)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (now == 0) now = wall_clock();
  auto& entropy = system_entropy();

  auto accept_policy = [&](const TrustAnchors& anchors) {
    if (!accept_list.empty()) return PrefixPolicy::parse(accept_list);
    std::vector<HierName> roots;
    for (const auto& a : anchors) roots.push_back(HierName::parse(a.root_name));
    return PrefixPolicy(std::move(roots));
  };

  try {
    if (*keygen) {
      const fs::path base = home() / keygen_out;
      const auto kp = SigningKeyPair::generate(entropy);
      write_new(base.string() + ".key", wire::encode(kp));
      write_new(base.string() + ".pub", kp.pub);
      std::cout << "public key " << to_hex(kp.pub) << '\n';
    } else if (*idp_init) {
      const fs::path h = home();
      if (fs::exists(h / "msk")) throw Failure{kUsage, (h / "msk").string() + " already exists"};
      const Principal root = new_root(root_name, entropy);
      write_new(h / "mpk", wire::encode(root.ibe_root->mpk));
      write_new(h / "msk", wire::encode(root.ibe_root->msk));
      write_new(h / "idp.key", wire::encode(root.keypair));
      write_new(h / "idp.blessing", wire::encode(root.blessing()));
      write_new(h / "anchors", wire::encode(TrustAnchors{root.trust_anchor()}));
      std::cout << "identity provider " << root.name().str() << " in " << h.string() << '\n';
    } else if (*idp_issue) {
      const Principal p = load_idp();
      const HierName name = HierName::parse(issue_name);
      const Bytes pub = read_input(issue_pub);
      if (pub.size() != ecdsa::kPublicKeySize || !ecdsa::valid_public_key(pub))
        throw Failure{kMalformedInput, issue_pub + ": not a public key"};
      PublicKey subject{};
      std::copy(pub.begin(), pub.end(), subject.begin());
      const Blessing b = issue_blessing(p, name, subject);
      const auto ring = issue_keyring(p, name, entropy);
      const fs::path base = home() / issue_out;
      write_new(base.string() + ".blessing", wire::encode(b));
      write_new(base.string() + ".keyring", wire::encode(ring));
      std::cout << "issued " << name.str() << " with " << ring.keys.size() << " IBE keys\n";
    } else if (*advertise) {
      discovery::BroadcastServer server({load_identity(identity), load_anchors()});
      const Bytes bytes = wire::encode(server.make_broadcast(PrefixPolicy::parse(policy_list), ttl, now, entropy));
      write_output(out_path, bytes);
      std::cerr << "broadcast " << bytes.size() << " bytes, mDNS budget " << wire::kMdnsBudget << ": "
                << (bytes.size() <= wire::kMdnsBudget ? "PASS" : "FAIL") << '\n';
      if (txt) std::cerr << wire::txt_to_text(wire::to_mdns_txt(ByteView(bytes)));
    } else if (*discover) {
      const TrustAnchors anchors = load_anchors();
      discovery::ClientConfig cfg{load_identity(identity), anchors, accept_policy(anchors)};
      const auto res = discovery::process_broadcast(cfg, read_input(in_path), now);
      if (res.status == discovery::DiscoverStatus::kNotAuthorized) {
        std::cout << "not authorized\n";
      } else if (res.ok()) {
        std::cout << res.service->server_name.str() << '\n';
      } else {
        std::cout << discovery::discover_status_name(res.status) << '\n';
      }
      return discover_exit(res.status);
    } else if (*connect) {
      const TrustAnchors anchors = load_anchors();
      discovery::BroadcastServer server({load_identity(server_id), anchors});
      discovery::ClientConfig cfg{load_identity(client_id), anchors, accept_policy(anchors)};
      const Bytes wire_bytes = wire::encode(server.make_broadcast(PrefixPolicy::parse(policy_list), ttl, now, entropy));
      const auto res = discovery::process_broadcast(cfg, wire_bytes, now);
      if (!res.ok()) {
        std::cout << (res.status == discovery::DiscoverStatus::kNotAuthorized ? "not authorized"
                                                                               : discovery::discover_status_name(res.status))
                  << '\n';
        return discover_exit(res.status);
      }
      std::optional<Bytes> early;
      if (!early_path.empty()) early = read_input(early_path);
      discovery::ClientConnection conn(cfg, *res.service);
      std::optional<ByteView> ev;
      if (early) ev = ByteView(*early);
      const auto f1 = conn.connect(ev, now, entropy);
      if (!f1) return kExpired;
      // Loopback: the frames cross as bytes, as they would on a socket.
      const auto accepted = server.accept(wire::decode<F1>(wire::encode(*f1)), now, entropy, std::nullopt);
      if (!accepted.ok()) {
        std::cout << "server rejected: " << discovery::accept_status_name(accepted.status) << '\n';
        return kCryptoFailure;
      }
      if (!conn.on_response(wire::decode<F2>(wire::encode(*accepted.f2)))) {
        std::cout << "client rejected response\n";
        return kCryptoFailure;
      }
      std::cout << "server " << res.service->server_name.str() << " atk " << fingerprint(accepted.atk) << '\n';
      std::cout << "client " << accepted.client_name->str() << " atk " << fingerprint(*conn.atk()) << '\n';
      if (accepted.early_data) std::cout << "early data " << accepted.early_data->size() << " bytes\n";
      return accepted.atk == *conn.atk() ? kOk : kCryptoFailure;
    } else if (*benchcmd) {
      const auto rows = bench_kind == "ibe" ? bench::ibe(iterations, entropy) : bench::handshake(iterations, entropy);
      std::cout << bench::to_tsv(rows);
    }
  } catch (const Failure& f) {
    std::cerr << "privdisc: " << f.message << '\n';
    return f.code;
  } catch (const Error& e) {
    std::cerr << "privdisc: " << e.what() << '\n';
    return error_exit(e);
  }
  return kOk;
}
