"""Published reference values that the acceptance tests compare against."""
