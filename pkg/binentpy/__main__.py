from binentpy.cli import main

raise SystemExit(main())
