#include "sbomvert/spdx.hpp"

#include "sbomvert/error.hpp"
#include "sbomvert/purl.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace sbomvert::spdx {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void missing(const std::string& what) { throw Error(ErrorCode::MissingRequiredField, what); }

const json* member(const json& obj, std::string_view key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::optional<std::string> opt_string(const json& obj, std::string_view key, std::string_view where) {
    const auto* v = member(obj, key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_string()) {
        throw Error(ErrorCode::MalformedJson, std::string(where) + ": '" + std::string(key) + "' must be a string");
    }
    return v->get<std::string>();
}

std::string req_string(const json& obj, std::string_view key, std::string_view where) {
    auto v = opt_string(obj, key, where);
    if (!v) missing(std::string(where) + ": missing '" + std::string(key) + "'");
    return std::move(*v);
}

const json& req_object(const json& v, std::string_view where) {
    if (!v.is_object()) throw Error(ErrorCode::MalformedJson, std::string(where) + " must be an object");
    return v;
}

std::vector<std::string> string_array(const json& obj, std::string_view key, std::string_view where) {
    std::vector<std::string> out;
    const auto* v = member(obj, key);
    if (!v || v->is_null()) return out;
    if (!v->is_array()) throw Error(ErrorCode::MalformedJson, std::string(where) + ": '" + std::string(key) + "' must be an array");
    for (const auto& item : *v) {
        if (!item.is_string()) throw Error(ErrorCode::MalformedJson, std::string(where) + ": '" + std::string(key) + "' holds a non-string");
        out.push_back(item.get<std::string>());
    }
    return out;
}

Extras extras_of(const json& obj, std::initializer_list<std::string_view> known) {
    Extras out = Extras::object();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::ranges::find(known, std::string_view(it.key())) == known.end()) out[it.key()] = *it;
    }
    return out;
}

const json* array_member(const json& obj, std::string_view key, std::string_view where) {
    const auto* v = member(obj, key);
    if (!v || v->is_null()) return nullptr;
    if (!v->is_array()) throw Error(ErrorCode::MalformedJson, std::string(where) + ": '" + std::string(key) + "' must be an array");
    return v;
}

SpdxPackage parse_package(const json& j, std::size_t index) {
    const auto where = "packages[" + std::to_string(index) + "]";
    req_object(j, where);
    SpdxPackage p;
    p.spdx_id = req_string(j, "SPDXID", where);
    p.name = req_string(j, "name", where);
    p.version_info = opt_string(j, "versionInfo", where);
    p.download_location = opt_string(j, "downloadLocation", where);
    p.source_info = opt_string(j, "sourceInfo", where);
    p.primary_package_purpose = opt_string(j, "primaryPackagePurpose", where);
    p.attribution_texts = string_array(j, "attributionTexts", where);
    if (const auto* refs = array_member(j, "externalRefs", where)) {
        for (const auto& r : *refs) {
            req_object(r, where + ".externalRefs");
            ExternalRef ref;
            ref.category = opt_string(r, "referenceCategory", where).value_or("");
            ref.type = opt_string(r, "referenceType", where).value_or("");
            ref.locator = req_string(r, "referenceLocator", where + ".externalRefs");
            ref.extras = extras_of(r, {"referenceCategory", "referenceType", "referenceLocator"});
            p.external_refs.push_back(std::move(ref));
        }
    }
    p.extras = extras_of(j, {"SPDXID", "name", "versionInfo", "downloadLocation", "sourceInfo",
                             "primaryPackagePurpose", "attributionTexts", "externalRefs"});
    return p;
}

template <typename Json>
void put_extras(Json& out, const Extras& extras) {
    for (auto it = extras.begin(); it != extras.end(); ++it) out[it.key()] = *it;
}

} // namespace

const ExternalRef* SpdxPackage::purl_ref() const {
    const auto it = std::ranges::find_if(external_refs, [](const ExternalRef& r) { return r.type == "purl"; });
    return it == external_refs.end() ? nullptr : &*it;
}

bool SpdxPackage::is_operating_system() const {
    return primary_package_purpose && *primary_package_purpose == kOperatingSystemPurpose;
}

const SpdxPackage* SpdxDocument::find_package(std::string_view id) const {
    const auto it = std::ranges::find_if(packages, [&](const SpdxPackage& p) { return p.spdx_id == id; });
    return it == packages.end() ? nullptr : &*it;
}

SpdxDocument parse(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedJson, e.what());
    }
    req_object(root, "document");

    SpdxDocument doc;
    doc.spdx_version = opt_string(root, "spdxVersion", "document");
    doc.data_license = opt_string(root, "dataLicense", "document");
    doc.spdx_id = opt_string(root, "SPDXID", "document").value_or(std::string(kDocumentId));
    doc.name = opt_string(root, "name", "document");
    doc.document_namespace = opt_string(root, "documentNamespace", "document");

    if (const auto* ci = member(root, "creationInfo"); ci && !ci->is_null()) {
        req_object(*ci, "creationInfo");
        CreationInfo info;
        info.creators = string_array(*ci, "creators", "creationInfo");
        info.created = opt_string(*ci, "created", "creationInfo");
        info.comment = opt_string(*ci, "comment", "creationInfo");
        info.extras = extras_of(*ci, {"creators", "created", "comment"});
        doc.creation_info = std::move(info);
    }

    const auto* packages = array_member(root, "packages", "document");
    if (!packages) missing("document: no 'packages' array");
    for (std::size_t i = 0; i < packages->size(); ++i) doc.packages.push_back(parse_package((*packages)[i], i));

    if (const auto* files = array_member(root, "files", "document")) {
        for (std::size_t i = 0; i < files->size(); ++i) {
            const auto where = "files[" + std::to_string(i) + "]";
            const auto& f = req_object((*files)[i], where);
            SpdxFile file;
            file.spdx_id = req_string(f, "SPDXID", where);
            file.file_name = req_string(f, "fileName", where);
            file.extras = extras_of(f, {"SPDXID", "fileName"});
            doc.files.push_back(std::move(file));
        }
    }
    if (const auto* rels = array_member(root, "relationships", "document")) {
        for (std::size_t i = 0; i < rels->size(); ++i) {
            const auto where = "relationships[" + std::to_string(i) + "]";
            const auto& r = req_object((*rels)[i], where);
            SpdxRelationship rel;
            rel.element = req_string(r, "spdxElementId", where);
            rel.type = req_string(r, "relationshipType", where);
            rel.related = req_string(r, "relatedSpdxElement", where);
            rel.extras = extras_of(r, {"spdxElementId", "relationshipType", "relatedSpdxElement"});
            doc.relationships.push_back(std::move(rel));
        }
    }
    doc.extras = extras_of(root, {"spdxVersion", "dataLicense", "SPDXID", "name", "documentNamespace", "creationInfo",
                                  "packages", "files", "relationships"});

    std::unordered_set<std::string> ids{doc.spdx_id};
    auto add_id = [&](const std::string& id) {
        if (!ids.insert(id).second) throw Error(ErrorCode::DuplicateIdentifier, "duplicate SPDXID '" + id + "'");
    };
    for (const auto& p : doc.packages) add_id(p.spdx_id);
    for (const auto& f : doc.files) add_id(f.spdx_id);
    if (const auto* snippets = member(doc.extras, "snippets"); snippets && snippets->is_array()) {
        for (const auto& s : *snippets) {
            if (s.is_object() && s.contains("SPDXID") && s["SPDXID"].is_string()) add_id(s["SPDXID"].get<std::string>());
        }
    }
    auto resolvable = [&](const std::string& id) {
        return ids.contains(id) || id == "NONE" || id == "NOASSERTION" || id.starts_with("DocumentRef-");
    };
    for (const auto& rel : doc.relationships) {
        for (const auto* id : {&rel.element, &rel.related}) {
            if (!resolvable(*id)) missing("relationship " + rel.type + " references unknown element '" + *id + "'");
        }
    }
    return doc;
}

std::string serialize(const SpdxDocument& doc) {
    ordered_json root = ordered_json::object();
    if (doc.spdx_version) root["spdxVersion"] = *doc.spdx_version;
    if (doc.data_license) root["dataLicense"] = *doc.data_license;
    root["SPDXID"] = doc.spdx_id;
    if (doc.name) root["name"] = *doc.name;
    if (doc.document_namespace) root["documentNamespace"] = *doc.document_namespace;
    if (doc.creation_info) {
        ordered_json ci = ordered_json::object();
        if (doc.creation_info->comment) ci["comment"] = *doc.creation_info->comment;
        if (doc.creation_info->created) ci["created"] = *doc.creation_info->created;
        ci["creators"] = doc.creation_info->creators;
        put_extras(ci, doc.creation_info->extras);
        root["creationInfo"] = std::move(ci);
    }

    ordered_json packages = ordered_json::array();
    for (const auto& p : doc.packages) {
        ordered_json j = ordered_json::object();
        j["name"] = p.name;
        j["SPDXID"] = p.spdx_id;
        if (p.version_info) j["versionInfo"] = *p.version_info;
        if (p.download_location) j["downloadLocation"] = *p.download_location;
        if (p.source_info) j["sourceInfo"] = *p.source_info;
        if (p.primary_package_purpose) j["primaryPackagePurpose"] = *p.primary_package_purpose;
        if (!p.external_refs.empty()) {
            ordered_json refs = ordered_json::array();
            for (const auto& r : p.external_refs) {
                ordered_json ref = ordered_json::object();
                ref["referenceCategory"] = r.category;
                ref["referenceType"] = r.type;
                ref["referenceLocator"] = r.locator;
                put_extras(ref, r.extras);
                refs.push_back(std::move(ref));
            }
            j["externalRefs"] = std::move(refs);
        }
        if (!p.attribution_texts.empty()) j["attributionTexts"] = p.attribution_texts;
        put_extras(j, p.extras);
        packages.push_back(std::move(j));
    }
    root["packages"] = std::move(packages);

    if (!doc.files.empty()) {
        ordered_json files = ordered_json::array();
        for (const auto& f : doc.files) {
            ordered_json j = ordered_json::object();
            j["fileName"] = f.file_name;
            j["SPDXID"] = f.spdx_id;
            put_extras(j, f.extras);
            files.push_back(std::move(j));
        }
        root["files"] = std::move(files);
    }
    if (!doc.relationships.empty()) {
        ordered_json rels = ordered_json::array();
        for (const auto& r : doc.relationships) {
            ordered_json j = ordered_json::object();
            j["spdxElementId"] = r.element;
            j["relationshipType"] = r.type;
            j["relatedSpdxElement"] = r.related;
            put_extras(j, r.extras);
            rels.push_back(std::move(j));
        }
        root["relationships"] = std::move(rels);
    }
    put_extras(root, doc.extras);
    return root.dump(2) + "\n";
}

IdentityFields package_identifier_view(const SpdxPackage& p, Dialect dialect) {
    IdentityFields view;
    view.package = p.name;

    if (dialect == Dialect::Trivy) {
        const auto src = p.source_info ? purl::parse_source_info(*p.source_info) : std::nullopt;
        if (!src) throw Error(ErrorCode::MissingSourceInfo, "package '" + p.name + "' has no usable sourceInfo");
        view.source = src->first;
        std::tie(view.epoch, view.version) = split_epoch(src->second);
        return view;
    }

    const auto* ref = p.purl_ref();
    if (!ref) missing("package '" + p.name + "' has no purl external reference");
    const auto url = purl::parse(ref->locator);
    view.package = url.name;

    auto version = url.version.value_or(p.version_info.value_or(""));
    if (dialect == Dialect::Anchore && p.version_info) version = *p.version_info;
    std::tie(view.epoch, view.version) = split_epoch(version);
    if (const auto* e = url.qualifier("epoch"); e && version.find(':') == std::string::npos) {
        view.epoch = static_cast<std::uint32_t>(std::stoul(*e));
    }

    view.source = url.name;
    if (url.qualifier("upstream") && dialect != Dialect::Docker) {
        try {
            view.source = purl::to_canonical(url).source_name;
        } catch (const Error&) {
            // not a deb/apk pURL; keep the package name
        }
    }

    if (dialect == Dialect::Docker) {
        if (const auto* v = url.qualifier("os_name")) view.os_name = *v;
        if (const auto* v = url.qualifier("os_version")) view.os_version = *v;
        return view;
    }
    if (const auto* v = url.qualifier("distro")) view.distro = *v;
    if (dialect != Dialect::Anchore) {
        if (const auto* v = url.qualifier("arch")) view.arch = *v;
    }
    return view;
}

} // namespace sbomvert::spdx
