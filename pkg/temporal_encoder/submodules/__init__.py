# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.
