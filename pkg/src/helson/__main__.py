from helson.cli import main

main()
