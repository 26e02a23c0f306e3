#pragma once

namespace atlas::cli {

// Exit status: 0 ok, 1 usage error (nothing written), 2 accuracy contract
// missed (artifacts written, manifest marked failed).
int run(int argc, char** argv);

}  // namespace atlas::cli
