#include <httplib.h>

#include "civic/geo.hpp"

namespace civic::geo {

namespace {

std::pair<int, std::string> http_get(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return {0, ""};
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
  httplib::Client client(base);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(10, 0);
  auto res = client.Get(path);
  if (!res) return {0, ""};
  return {res->status, res->body};
}

}  // namespace

std::string fetch_geoid_remote(const std::string& endpoint, double lat, double lon) {
  return fetch_geoid_remote(endpoint, lat, lon, http_get);
}

}  // namespace civic::geo
