# Core app migrations
