"""Command line runner, configuration and manifests."""
