"""Gap numbers of the T-tetromino via fringe digraphs."""
