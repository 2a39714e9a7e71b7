#include "labbook/provstore/bundle.hpp"

#include <map>

#include "labbook/canonical_json.hpp"
#include "labbook/error.hpp"
#include "labbook/provstore/loose.hpp"
#include "labbook/provstore/verify.hpp"
#include "labbook/provstore/zip.hpp"

namespace labbook::provstore {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(Errc::corrupt_bundle, "corrupt bundle: " + what);
}

std::string head_text(const HeadState& head) {
  return head.branch ? "ref: refs/heads/" + *head.branch : head.commit.hex();
}

} // namespace

std::string export_bundle_bytes(const Repository& repo) {
  auto report = verify(repo);
  if (!report.ok()) {
    const auto& f = report.findings.front();
    throw Error(Errc::integrity_error, "repository does not verify (" + f.check + " " + f.subject +
                                           ": " + f.detail + ")");
  }

  auto refs = repo.list_refs();
  auto head = repo.head();

  Json manifest;
  manifest["format_version"] = kBundleFormatVersion;
  manifest["repo_name"] = repo.name();
  manifest["head"] = head_text(head);
  manifest["refs"] = Json::object();
  for (const auto& [name, id] : refs) manifest["refs"][name] = id.hex();

  zip::Writer w;
  w.add("manifest.json", canonical_dump(manifest));
  w.add("HEAD", head_text(head) + "\n");
  for (const auto& id : repo.list_objects()) {
    w.add("objects/" + id.hex().substr(0, 2) + "/" + id.hex().substr(2),
          read_file(loose_object_path(repo.path(), id)));
  }
  for (const auto& [name, id] : refs) w.add("refs/heads/" + name, id.hex() + "\n");
  for (const auto& [id, list] : repo.all_annotations()) {
    w.add("annotations/" + id.hex(), read_file(repo.path() / "annotations" / id.hex()));
  }
  return w.finish();
}

void export_bundle(const Repository& repo, const fs::path& bundle) {
  write_file_atomic(bundle, export_bundle_bytes(repo));
}

Repository import_bundle_bytes(std::string_view bytes, const fs::path& dest) {
  auto entries = zip::read_archive(bytes);

  const zip::Entry* manifest_entry = nullptr;
  for (const auto& e : entries) {
    if (e.name == "manifest.json") manifest_entry = &e;
  }
  if (!manifest_entry) corrupt("manifest.json missing");
  Json manifest;
  try {
    manifest = Json::parse(manifest_entry->data);
  } catch (const Json::exception&) {
    corrupt("manifest.json is not JSON");
  }
  if (!manifest.is_object() || !manifest.contains("format_version") ||
      manifest["format_version"] != kBundleFormatVersion) {
    throw Error(Errc::unsupported, "unsupported bundle format version");
  }
  if (!manifest.contains("refs") || !manifest["refs"].is_object() ||
      !manifest["refs"].contains("main")) {
    throw Error(Errc::unsupported, "bundle manifest lists no main branch");
  }

  std::map<std::string, ObjectId> refs;
  for (const auto& [name, value] : manifest["refs"].items()) {
    if (!value.is_string() || !is_valid_ref_name(name)) corrupt("bad ref " + name);
    auto id = ObjectId::parse(value.get<std::string>());
    if (!id) corrupt("bad ref target for " + name);
    refs.emplace(name, *id);
  }
  std::string head = manifest.value("head", std::string("ref: refs/heads/main"));
  if (!head.starts_with("ref: refs/heads/") && !ObjectId::parse(head)) corrupt("bad head");

  std::map<ObjectId, std::string> objects;
  std::map<ObjectId, std::string> annotations;
  std::map<std::string, std::string> ref_files;
  for (const auto& e : entries) {
    if (e.name.starts_with("objects/")) {
      auto rest = e.name.substr(8);
      if (rest.size() != 41 || rest[2] != '/') corrupt("bad object entry " + e.name);
      auto id = ObjectId::parse(rest.substr(0, 2) + rest.substr(3));
      if (!id) corrupt("bad object entry " + e.name);
      LooseObject obj;
      try {
        obj = decode_loose_object(e.data);
      } catch (const Error&) {
        corrupt("object " + id->hex() + " does not inflate");
      }
      if (hash_object(obj.kind, obj.content) != *id) {
        corrupt("digest mismatch for object " + id->hex());
      }
      objects.emplace(*id, e.data);
    } else if (e.name.starts_with("annotations/")) {
      auto id = ObjectId::parse(e.name.substr(12));
      if (!id) corrupt("bad annotation entry " + e.name);
      annotations.emplace(*id, e.data);
    } else if (e.name.starts_with("refs/heads/")) {
      ref_files.emplace(e.name.substr(11), e.data);
    } else if (e.name != "manifest.json" && e.name != "HEAD") {
      corrupt("unexpected entry " + e.name);
    }
  }
  for (const auto& [name, id] : refs) {
    auto it = ref_files.find(name);
    if (it == ref_files.end() || it->second != id.hex() + "\n") {
      corrupt("ref " + name + " disagrees with manifest");
    }
  }
  if (ref_files.size() != refs.size()) corrupt("ref entries not listed in manifest");

  std::error_code ec;
  if (fs::exists(dest, ec) && !(fs::is_directory(dest, ec) && fs::is_empty(dest, ec))) {
    throw Error(Errc::already_exists, "import destination not empty: " + dest.string());
  }
  fs::create_directories(dest / "objects", ec);
  fs::create_directories(dest / "refs" / "heads", ec);
  fs::create_directories(dest / "annotations", ec);
  write_file_atomic(dest / "config",
                    "[core]\n\trepositoryformatversion = 0\n\tfilemode = true\n\tbare = true\n");
  for (const auto& [id, data] : objects) write_file_atomic(loose_object_path(dest, id), data);
  for (const auto& [name, id] : refs) write_file_atomic(dest / "refs" / "heads" / name, id.hex() + "\n");
  for (const auto& [id, data] : annotations) write_file_atomic(dest / "annotations" / id.hex(), data);
  write_file_atomic(dest / "HEAD", head + "\n");

  auto repo = Repository::open(dest);
  auto report = verify(repo);
  if (!report.ok()) {
    const auto& f = report.findings.front();
    fs::remove_all(dest, ec);
    corrupt("imported repository does not verify (" + f.check + " " + f.subject + ": " +
            f.detail + ")");
  }
  return repo;
}

Repository import_bundle(const fs::path& bundle, const fs::path& dest) {
  std::string bytes;
  try {
    bytes = read_file(bundle);
  } catch (const Error&) {
    throw Error(Errc::not_found, "cannot read bundle " + bundle.string());
  }
  return import_bundle_bytes(bytes, dest);
}

} // namespace labbook::provstore
